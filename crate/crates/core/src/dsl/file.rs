use std::collections::BTreeSet;
use std::fmt;

use super::expr::{parse_expr_at, At, Expr, Func};
use super::{DslError, ErrorKind, Pos};
use crate::parity::Parity;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantDecl {
    pub name: String,
    pub parity: Parity,
    /// Value as an expression over numbers and earlier constants.
    pub value: Option<Expr>,
    pub at: At,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableDecl {
    pub name: String,
    pub parity: Parity,
    pub at: At,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperfieldLine {
    pub name: String,
    pub parity: Parity,
    pub n: u8,
    pub components: Option<Vec<String>>,
    pub at: At,
}

/// `dt^order(target) = rhs`
#[derive(Debug, Clone, PartialEq)]
pub struct EquationLine {
    pub order: u32,
    pub target: String,
    pub rhs: Expr,
    pub at: At,
}

/// Candidate first integral, optionally valid only with some constants set
/// to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralLine {
    pub name: String,
    pub expr: Expr,
    pub when: Vec<String>,
    pub at: At,
}

/// `init x = ..`, `assign alpha = ..` or `seed x = ..`.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingLine {
    pub name: String,
    pub value: Expr,
    pub at: At,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveSection {
    pub t0: Option<Expr>,
    pub t_end: Option<Expr>,
    pub h: Option<Expr>,
    pub generator: Option<String>,
    pub init: Vec<SettingLine>,
    pub assign: Vec<SettingLine>,
    pub seed: Vec<SettingLine>,
}

impl SolveSection {
    fn is_empty(&self) -> bool {
        *self == SolveSection::default()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SystemFile {
    pub meta: Vec<(String, String)>,
    /// Number of Grassmann generators `L` used for numerics.
    pub generators: Option<u32>,
    pub constants: Vec<ConstantDecl>,
    pub variables: Vec<VariableDecl>,
    pub superfields: Vec<SuperfieldLine>,
    pub equations: Vec<EquationLine>,
    pub integrals: Vec<IntegralLine>,
    pub solve: SolveSection,
}

impl SystemFile {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn integral_line(&self, name: &str) -> Option<&IntegralLine> {
        self.integrals.iter().find(|i| i.name == name)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Meta,
    Algebra,
    Constants,
    Variables,
    Superfields,
    Equations,
    Integrals,
    Solve,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// One non-empty line with its number and the column of each byte offset.
struct Line<'a> {
    text: &'a str,
    no: usize,
    /// Column of `text`'s first character in the source line.
    col0: usize,
}

impl<'a> Line<'a> {
    fn pos_of(&self, sub: &str) -> Pos {
        let offset = sub.as_ptr() as usize - self.text.as_ptr() as usize;
        Pos {
            line: self.no,
            col: self.col0 + self.text[..offset].chars().count(),
        }
    }

    fn start(&self) -> Pos {
        Pos {
            line: self.no,
            col: self.col0,
        }
    }

    fn err(&self, sub: &str, msg: impl Into<String>) -> DslError {
        DslError::new(self.pos_of(sub), ErrorKind::Syntax(msg.into()))
    }

    /// Split at the first occurrence of `sep`, trimming both halves.
    fn split(&self, src: &'a str, sep: char) -> Result<(&'a str, &'a str), DslError> {
        let (a, b) = src
            .split_once(sep)
            .ok_or_else(|| self.err(src, format!("expected `{sep}`")))?;
        Ok((a.trim(), b.trim()))
    }

    fn ident(&self, s: &'a str) -> Result<String, DslError> {
        if is_ident(s) {
            Ok(s.to_string())
        } else {
            Err(self.err(s, format!("expected a name, found `{s}`")))
        }
    }

    fn expr(&self, s: &str) -> Result<Expr, DslError> {
        if s.is_empty() {
            return Err(self.err(s, "missing expression"));
        }
        parse_expr_at(s, self.pos_of(s))
    }

    fn parity(&self, s: &str) -> Result<Parity, DslError> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(self.err(s, format!("expected `even` or `odd`, found `{s}`"))),
        }
    }
}

pub(super) fn parse(text: &str) -> Result<SystemFile, DslError> {
    let mut file = SystemFile::default();
    let mut section: Option<Section> = None;
    let mut seen_sections = BTreeSet::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let text = content.trim();
        if text.is_empty() {
            continue;
        }
        let col0 = content[..content.len() - content.trim_start().len()].chars().count() + 1;
        let line = Line {
            text,
            no: idx + 1,
            col0,
        };
        if let Some(header) = text.strip_prefix('[') {
            let name = header
                .strip_suffix(']')
                .ok_or_else(|| line.err(text, "unterminated section header"))?
                .trim();
            let s = match name {
                "meta" => Section::Meta,
                "algebra" => Section::Algebra,
                "constants" => Section::Constants,
                "variables" => Section::Variables,
                "superfields" => Section::Superfields,
                "equations" => Section::Equations,
                "integrals" => Section::Integrals,
                "solve" => Section::Solve,
                other => return Err(line.err(text, format!("unknown section `{other}`"))),
            };
            if !seen_sections.insert(name.to_string()) {
                return Err(DslError::new(line.start(), ErrorKind::Duplicate(format!("[{name}]"))));
            }
            section = Some(s);
            continue;
        }
        let Some(s) = section else {
            return Err(line.err(text, "content before the first section header"));
        };
        let mut declare = |name: &str, pos: Pos| {
            if names.insert(name.to_string()) {
                Ok(())
            } else {
                Err(DslError::new(pos, ErrorKind::Duplicate(name.to_string())))
            }
        };
        match s {
            Section::Meta => {
                let (k, v) = line.split(text, '=')?;
                file.meta.push((line.ident(k)?, v.to_string()));
            }
            Section::Algebra => {
                let (k, v) = line.split(text, '=')?;
                if k != "L" {
                    return Err(line.err(k, format!("unknown algebra setting `{k}`")));
                }
                let l: u32 = v.parse().map_err(|_| line.err(v, "L must be a non-negative integer"))?;
                file.generators = Some(l);
            }
            Section::Constants => {
                let (name, rest) = line.split(text, ':')?;
                let (parity, value) = match rest.split_once('=') {
                    Some((p, v)) => (p.trim(), Some(line.expr(v.trim())?)),
                    None => (rest, None),
                };
                declare(name, line.start())?;
                file.constants.push(ConstantDecl {
                    name: line.ident(name)?,
                    parity: line.parity(parity)?,
                    value,
                    at: At(line.start()),
                });
            }
            Section::Variables => {
                let (name, parity) = line.split(text, ':')?;
                declare(name, line.start())?;
                file.variables.push(VariableDecl {
                    name: line.ident(name)?,
                    parity: line.parity(parity)?,
                    at: At(line.start()),
                });
            }
            Section::Superfields => {
                let (name, rest) = line.split(text, ':')?;
                let (head, list) = match rest.split_once('(') {
                    Some((h, l)) => {
                        let inner = l.trim().strip_suffix(')').ok_or_else(|| line.err(l, "expected `)`"))?;
                        let comps = inner
                            .split(',')
                            .map(|c| {
                                let c = c.trim();
                                line.ident(c)
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        (h.trim(), Some(comps))
                    }
                    None => (rest, None),
                };
                let mut words = head.split_whitespace();
                let parity = line.parity(words.next().unwrap_or(""))?;
                let nword = words.next().ok_or_else(|| line.err(head, "expected `N=<k>`"))?;
                let n: u8 = nword
                    .strip_prefix("N=")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| line.err(nword, "expected `N=<k>`"))?;
                if let Some(extra) = words.next() {
                    return Err(line.err(extra, format!("unexpected `{extra}`")));
                }
                declare(name, line.start())?;
                for c in list.iter().flatten() {
                    declare(c, line.start())?;
                }
                file.superfields.push(SuperfieldLine {
                    name: line.ident(name)?,
                    parity,
                    n,
                    components: list,
                    at: At(line.start()),
                });
            }
            Section::Equations => {
                let (lhs, rhs) = line.split(text, '=')?;
                let (order, target) = match line.expr(lhs)? {
                    Expr::Call {
                        func: Func::Dt(k), arg, ..
                    } => match *arg {
                        Expr::Ident { name, .. } => (k, name),
                        _ => return Err(line.err(lhs, "left-hand side must be dt^k(<name>)")),
                    },
                    _ => return Err(line.err(lhs, "left-hand side must be dt^k(<name>)")),
                };
                file.equations.push(EquationLine {
                    order,
                    target,
                    rhs: line.expr(rhs)?,
                    at: At(line.start()),
                });
            }
            Section::Integrals => {
                let (name, rest) = line.split(text, '=')?;
                let (body, when) = match rest.split_once(" when ") {
                    Some((b, w)) => {
                        let mut zero = Vec::new();
                        for cond in w.split(',') {
                            let (c, v) = line.split(cond, '=')?;
                            if v != "0" {
                                return Err(line.err(v, "`when` conditions must set a constant to 0"));
                            }
                            zero.push(line.ident(c)?);
                        }
                        (b.trim(), zero)
                    }
                    None => (rest, Vec::new()),
                };
                if file.integrals.iter().any(|i| i.name == name) {
                    return Err(DslError::new(line.start(), ErrorKind::Duplicate(name.to_string())));
                }
                file.integrals.push(IntegralLine {
                    name: line.ident(name)?,
                    expr: line.expr(body)?,
                    when,
                    at: At(line.start()),
                });
            }
            Section::Solve => {
                let (lhs, rhs) = line.split(text, '=')?;
                let mut words = lhs.split_whitespace();
                let key = words.next().unwrap_or("");
                let target = words.next();
                let solve = &mut file.solve;
                let setting = |target: Option<&'_ str>| -> Result<SettingLine, DslError> {
                    let name = target.ok_or_else(|| line.err(lhs, format!("`{key}` needs a name")))?;
                    Ok(SettingLine {
                        name: line.ident(name)?,
                        value: line.expr(rhs)?,
                        at: At(line.start()),
                    })
                };
                match key {
                    "init" => solve.init.push(setting(target)?),
                    "assign" => solve.assign.push(setting(target)?),
                    "seed" => solve.seed.push(setting(target)?),
                    "t0" | "t_end" | "h" | "generator" if target.is_none() => {
                        if key == "generator" {
                            solve.generator = Some(line.ident(rhs)?);
                        } else {
                            let slot = match key {
                                "t0" => &mut solve.t0,
                                "t_end" => &mut solve.t_end,
                                _ => &mut solve.h,
                            };
                            *slot = Some(line.expr(rhs)?);
                        }
                    }
                    _ => return Err(line.err(lhs, format!("unknown solve setting `{lhs}`"))),
                }
            }
        }
    }
    Ok(file)
}

impl fmt::Display for SystemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut blocks: Vec<String> = Vec::new();
        let mut block = |title: &str, lines: Vec<String>| {
            if !lines.is_empty() {
                blocks.push(format!("[{title}]\n{}\n", lines.join("\n")));
            }
        };
        block("meta", self.meta.iter().map(|(k, v)| format!("{k} = {v}")).collect());
        block("algebra", self.generators.iter().map(|l| format!("L = {l}")).collect());
        block(
            "constants",
            self.constants
                .iter()
                .map(|c| match &c.value {
                    Some(v) => format!("{} : {} = {v}", c.name, c.parity),
                    None => format!("{} : {}", c.name, c.parity),
                })
                .collect(),
        );
        block(
            "variables",
            self.variables
                .iter()
                .map(|v| format!("{} : {}", v.name, v.parity))
                .collect(),
        );
        block(
            "superfields",
            self.superfields
                .iter()
                .map(|s| {
                    let head = format!("{} : {} N={}", s.name, s.parity, s.n);
                    match &s.components {
                        Some(c) => format!("{head} ({})", c.join(", ")),
                        None => head,
                    }
                })
                .collect(),
        );
        block(
            "equations",
            self.equations
                .iter()
                .map(|e| format!("{}({}) = {}", Func::Dt(e.order), e.target, e.rhs))
                .collect(),
        );
        block(
            "integrals",
            self.integrals
                .iter()
                .map(|i| {
                    if i.when.is_empty() {
                        format!("{} = {}", i.name, i.expr)
                    } else {
                        let conds: Vec<String> = i.when.iter().map(|c| format!("{c} = 0")).collect();
                        format!("{} = {} when {}", i.name, i.expr, conds.join(", "))
                    }
                })
                .collect(),
        );
        if !self.solve.is_empty() {
            let s = &self.solve;
            let mut lines = Vec::new();
            for (k, v) in [("t0", &s.t0), ("t_end", &s.t_end), ("h", &s.h)] {
                if let Some(v) = v {
                    lines.push(format!("{k} = {v}"));
                }
            }
            if let Some(g) = &s.generator {
                lines.push(format!("generator = {g}"));
            }
            for (k, items) in [("init", &s.init), ("assign", &s.assign), ("seed", &s.seed)] {
                lines.extend(items.iter().map(|l| format!("{k} {} = {}", l.name, l.value)));
            }
            block("solve", lines);
        }
        f.write_str(&blocks.join("\n"))
    }
}
