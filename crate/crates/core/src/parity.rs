use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// Z2 grading of symbols, superfields and algebra elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_count(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Parity addition (XOR).
impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Parity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(format!("unknown parity `{other}`")),
        }
    }
}

/// Sign of the permutation that stably sorts `items`, or `None` if two items
/// compare equal (an anticommuting factor repeated).
pub(crate) fn sort_with_sign<T: Ord>(items: &mut [T]) -> Option<bool> {
    // insertion sort; factor lists are short
    let mut negative = false;
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 {
            match items[j - 1].cmp(&items[j]) {
                std::cmp::Ordering::Greater => {
                    items.swap(j - 1, j);
                    negative = !negative;
                    j -= 1;
                }
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => break,
            }
        }
    }
    if items.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(negative)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sort_sign_counts_transpositions() {
        let mut v = [3, 1, 2];
        assert_eq!(sort_with_sign(&mut v), Some(false));
        assert_eq!(v, [1, 2, 3]);
        let mut v = [2, 1];
        assert_eq!(sort_with_sign(&mut v), Some(true));
        let mut v = [1, 3, 1];
        assert_eq!(sort_with_sign(&mut v), None);
    }
}
