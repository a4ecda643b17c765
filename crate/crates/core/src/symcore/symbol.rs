use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::parity::Parity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// Superspace odd coordinate θ^i; sorts before every other symbol.
    Theta(u8),
    /// Dependent variable (or one of its t-derivatives when `order > 0`).
    Dynamic,
    /// Parameter with vanishing t-derivative.
    Constant,
}

/// A graded symbol. Derivative symbols share the base name and parity and
/// carry the derivative order.
#[derive(Debug, Clone)]
pub struct Symbol {
    name: Arc<str>,
    parity: Parity,
    kind: SymbolKind,
    order: u32,
}

impl Symbol {
    pub fn dynamic(name: &str, parity: Parity) -> Symbol {
        Symbol {
            name: name.into(),
            parity,
            kind: SymbolKind::Dynamic,
            order: 0,
        }
    }

    pub fn constant(name: &str, parity: Parity) -> Symbol {
        Symbol {
            name: name.into(),
            parity,
            kind: SymbolKind::Constant,
            order: 0,
        }
    }

    pub fn theta(index: u8) -> Symbol {
        Symbol {
            name: format!("theta{index}").into(),
            parity: Parity::Odd,
            kind: SymbolKind::Theta(index),
            order: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_odd(&self) -> bool {
        self.parity.is_odd()
    }

    pub fn is_dynamic(&self) -> bool {
        self.kind == SymbolKind::Dynamic
    }

    pub fn is_constant(&self) -> bool {
        self.kind == SymbolKind::Constant
    }

    pub fn theta_index(&self) -> Option<u8> {
        match self.kind {
            SymbolKind::Theta(i) => Some(i),
            _ => None,
        }
    }

    /// The k-th t-derivative of a dynamic symbol.
    pub fn derivative(&self, k: u32) -> Symbol {
        debug_assert!(self.is_dynamic());
        Symbol {
            order: self.order + k,
            ..self.clone()
        }
    }

    /// Underlying (order 0) symbol.
    pub fn base(&self) -> Symbol {
        Symbol {
            order: 0,
            ..self.clone()
        }
    }

    fn rank(&self) -> (u8, u8) {
        match self.kind {
            SymbolKind::Theta(i) => (0, i),
            _ => (1, 0),
        }
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Symbol {}

impl std::hash::Hash for Symbol {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.order.hash(state);
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| natural_cmp(&self.name, &other.name))
            .then_with(|| self.order.cmp(&other.order))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for _ in 0..self.order {
            f.write_str("'")?;
        }
        Ok(())
    }
}

/// Compare names treating embedded digit runs as numbers (`xi2 < xi10`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut ai = a.chars().peekable();
    let mut bi = b.chars().peekable();
    loop {
        match (ai.peek().copied(), bi.peek().copied()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(ca), Some(cb)) if ca.is_ascii_digit() && cb.is_ascii_digit() => {
                let mut da = String::new();
                while let Some(c) = ai.peek().copied().filter(char::is_ascii_digit) {
                    da.push(c);
                    ai.next();
                }
                let mut db = String::new();
                while let Some(c) = bi.peek().copied().filter(char::is_ascii_digit) {
                    db.push(c);
                    bi.next();
                }
                let ta = da.trim_start_matches('0');
                let tb = db.trim_start_matches('0');
                let ord = ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            (Some(ca), Some(cb)) => {
                if ca != cb {
                    return ca.cmp(&cb);
                }
                ai.next();
                bi.next();
            }
        }
    }
}
