//! Textual identities in one binary operation, their linearization, and the
//! built-in operad presets.
//!
//! Grammar (one identity per line, `#` starts a comment):
//!
//! ```text
//! identity := expr "=" expr
//! expr     := ["-"] term { ("+" | "-") term } | "0"
//! term     := [unsigned-integer "*"] monomial
//! monomial := primary { "*" primary }          (left-associative)
//! primary  := variable | "(" monomial ")"
//! variable := letter { letter | digit }
//! ```
//!
//! Variable names are numbered in natural sort order (`x < y`, `x2 < x10`),
//! so the internal numbering depends only on the set of names used.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::monomials::{Monomial, MonomialError, Permutation, Var, MAX_VAR};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: terms do not all use the same variables with the same multiplicities")]
    MixedVariables { line: usize },
    #[error("line {line}: identity is empty (all terms cancel)")]
    Empty { line: usize },
    #[error("identity is already multilinear; nothing to linearize")]
    AlreadyMultilinear,
    #[error("identity is not homogeneous in its variables")]
    Inhomogeneous,
    #[error("coefficient overflow")]
    Overflow,
    #[error("unknown preset `{name}`; available presets: {}", available.join(", "))]
    UnknownPreset {
        name: String,
        available: Vec<String>,
    },
    #[error(transparent)]
    Monomial(#[from] MonomialError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: i64,
    pub monomial: Monomial,
}

/// A nonzero integer combination of monomials, read as `Σ terms = 0`.
///
/// Terms are merged, free of zero coefficients, and sorted by the canonical
/// monomial order. Variable `i` is named `names[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    terms: Vec<Term>,
    names: Vec<String>,
}

impl Identity {
    /// Builds an identity from raw terms whose labels index into `names`.
    ///
    /// Variables are renumbered by natural name order, like terms are merged
    /// and all terms must share one variable multiset.
    pub fn new(terms: Vec<(i64, Monomial)>, names: Vec<String>) -> Result<Self, IdentityError> {
        Self::build(terms, names, 1)
    }

    fn build(
        terms: Vec<(i64, Monomial)>,
        names: Vec<String>,
        line: usize,
    ) -> Result<Self, IdentityError> {
        let mut used = vec![false; names.len() + 1];
        for (_, m) in &terms {
            for &v in m.labels() {
                match used.get_mut(v as usize) {
                    Some(u) => *u = true,
                    None => return Err(MonomialError::BadVariable(v as usize).into()),
                }
            }
        }
        let mut order: Vec<usize> = (1..=names.len()).filter(|&i| used[i]).collect();
        order.sort_by(|&a, &b| natural_cmp(&names[a - 1], &names[b - 1]));
        let mut new_index = vec![0 as Var; names.len() + 1];
        for (k, &old) in order.iter().enumerate() {
            new_index[old] = (k + 1) as Var;
        }
        let new_names: Vec<String> = order.iter().map(|&i| names[i - 1].clone()).collect();

        let mut merged: BTreeMap<Monomial, i64> = BTreeMap::new();
        for (c, m) in terms {
            let m = m.map_labels(|v| new_index[v as usize]);
            let entry = merged.entry(m).or_insert(0);
            *entry = entry.checked_add(c).ok_or(IdentityError::Overflow)?;
        }
        let terms: Vec<Term> = merged
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(monomial, coeff)| Term { coeff, monomial })
            .collect();
        if terms.is_empty() {
            return Err(IdentityError::Empty { line });
        }
        let profile = multiplicities(&terms[0].monomial);
        if terms.iter().any(|t| multiplicities(&t.monomial) != profile) {
            return Err(IdentityError::MixedVariables { line });
        }
        let names = new_names
            .into_iter()
            .enumerate()
            .filter(|(i, _)| profile.contains_key(&((i + 1) as Var)))
            .map(|(_, n)| n)
            .collect::<Vec<_>>();
        // Variables that vanished with cancelled terms leave holes; renumber.
        let id = Identity { terms, names };
        Ok(id.compacted())
    }

    fn compacted(self) -> Self {
        let present: Vec<Var> = multiplicities(&self.terms[0].monomial)
            .keys()
            .copied()
            .collect();
        if present
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
        {
            return self;
        }
        let mut map = vec![0 as Var; MAX_VAR as usize + 1];
        for (i, &v) in present.iter().enumerate() {
            map[v as usize] = (i + 1) as Var;
        }
        let terms = self
            .terms
            .into_iter()
            .map(|t| Term {
                coeff: t.coeff,
                monomial: t.monomial.map_labels(|v| map[v as usize]),
            })
            .collect();
        Identity {
            terms,
            names: self.names,
        }
    }

    /// Multilinear identity on `1..=k` with names `x1, x2, ...`.
    pub fn with_default_names(terms: Vec<(i64, Monomial)>) -> Result<Self, IdentityError> {
        let k = terms
            .iter()
            .flat_map(|(_, m)| m.labels().iter().copied())
            .max()
            .unwrap_or(0) as usize;
        Self::new(terms, default_names(k))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self) -> usize {
        self.terms[0].monomial.degree()
    }

    /// Number of distinct variables.
    pub fn variable_count(&self) -> usize {
        self.names.len()
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms[0].monomial.is_multilinear()
    }

    /// Multiplicity of each variable (the same in every term).
    pub fn multiplicities(&self) -> BTreeMap<Var, usize> {
        multiplicities(&self.terms[0].monomial)
    }

    /// Renames variables by name; names not in `map` are kept.
    pub fn renamed(&self, map: &[(&str, &str)]) -> Result<Self, IdentityError> {
        let names = self
            .names
            .iter()
            .map(|n| {
                map.iter()
                    .find(|(from, _)| from == n)
                    .map(|(_, to)| to.to_string())
                    .unwrap_or_else(|| n.clone())
            })
            .collect();
        Self::new(
            self.terms
                .iter()
                .map(|t| (t.coeff, t.monomial.clone()))
                .collect(),
            names,
        )
    }

    /// Applies a permutation of the variable indices.
    pub fn relabel(&self, pi: &Permutation) -> Result<Self, IdentityError> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.coeff, t.monomial.relabel(pi)?)))
            .collect::<Result<Vec<_>, MonomialError>>()?;
        Self::new(terms, self.names.clone())
    }

    /// The identity with every product reversed, `x ∘ y = y x`.
    pub fn opposite(&self) -> Result<Self, IdentityError> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.coeff, mirror(&t.monomial)?)))
            .collect::<Result<Vec<_>, MonomialError>>()?;
        Self::new(terms, self.names.clone())
    }

    fn name_of(&self, v: Var) -> String {
        self.names
            .get(v as usize - 1)
            .cloned()
            .unwrap_or_else(|| format!("x{v}"))
    }
}

fn mirror(m: &Monomial) -> Result<Monomial, MonomialError> {
    match m.factors() {
        None => Ok(m.clone()),
        Some((l, r)) => mirror(&r)?.product(&mirror(&l)?),
    }
}

fn multiplicities(m: &Monomial) -> BTreeMap<Var, usize> {
    let mut counts = BTreeMap::new();
    for &v in m.labels() {
        *counts.entry(v).or_insert(0) += 1;
    }
    counts
}

pub(crate) fn default_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

/// Natural order on names: digit runs compare numerically.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(cb.iter()) {
        let ord = match (x, y) {
            ((true, dx), (true, dy)) => {
                let (tx, ty) = (dx.trim_start_matches('0'), dy.trim_start_matches('0'));
                tx.len().cmp(&ty.len()).then_with(|| tx.cmp(ty))
            }
            ((_, sx), (_, sy)) => sx.cmp(sy),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: Var| self.name_of(v);
        for (i, t) in self.terms.iter().enumerate() {
            let sign = if t.coeff < 0 { "-" } else { "+" };
            match (i, t.coeff < 0) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                _ => write!(f, " {sign} ")?,
            }
            let abs = t.coeff.unsigned_abs();
            if abs != 1 {
                write!(f, "{abs}*")?;
            }
            write!(f, "{}", t.monomial.display_with(&names))?;
        }
        f.write_str(" = 0")
    }
}

/// Outcome of [`validate_multilinear`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearReport {
    pub degree: usize,
    /// Variables occurring more than once per term, with multiplicities.
    pub offending: Vec<(String, usize)>,
}

impl MultilinearReport {
    pub fn is_multilinear(&self) -> bool {
        self.offending.is_empty()
    }
}

impl fmt::Display for MultilinearReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_multilinear() {
            return write!(f, "multilinear of degree {}", self.degree);
        }
        f.write_str("not multilinear:")?;
        for (name, d) in &self.offending {
            write!(f, " {name} has multiplicity {d};")?;
        }
        Ok(())
    }
}

pub fn validate_multilinear(id: &Identity) -> MultilinearReport {
    let offending = id
        .multiplicities()
        .into_iter()
        .filter(|&(_, d)| d > 1)
        .map(|(v, d)| (id.name_of(v), d))
        .collect();
    MultilinearReport {
        degree: id.degree(),
        offending,
    }
}

/// Full linearization: each variable of multiplicity `d` is replaced by `d`
/// fresh variables and only the part linear in each of them is kept.
/// Fresh variables are named by suffixing the original name with `1..=d`.
/// The result is divided by the gcd of its coefficients.
pub fn linearize(id: &Identity) -> Result<Identity, IdentityError> {
    let mult = id.multiplicities();
    for t in &id.terms {
        if multiplicities(&t.monomial) != mult {
            return Err(IdentityError::Inhomogeneous);
        }
    }
    if mult.values().all(|&d| d == 1) {
        return Err(IdentityError::AlreadyMultilinear);
    }

    // New variable numbering: every original variable gets a block of
    // `multiplicity` consecutive indices.
    let mut names: Vec<String> = Vec::new();
    let mut block: BTreeMap<Var, Vec<Var>> = BTreeMap::new();
    let taken: Vec<&String> = id.names.iter().collect();
    for (&v, &d) in &mult {
        let base = id.name_of(v);
        let mut fresh = Vec::new();
        if d == 1 {
            names.push(base);
            fresh.push(names.len() as Var);
        } else {
            let mut stem = base.clone();
            while (1..=d).any(|i| {
                let candidate = format!("{stem}{i}");
                taken.iter().any(|n| **n == candidate) || names.contains(&candidate)
            }) {
                stem.push('v');
            }
            for i in 1..=d {
                names.push(format!("{stem}{i}"));
                fresh.push(names.len() as Var);
            }
        }
        block.insert(v, fresh);
    }
    if names.len() > MAX_VAR as usize {
        return Err(MonomialError::BadVariable(names.len()).into());
    }

    let mut out: Vec<(i64, Monomial)> = Vec::new();
    for t in &id.terms {
        let labels = t.monomial.labels();
        // Each repeated variable's occurrences receive its fresh variables in
        // every possible order.
        let mut words: Vec<Vec<Var>> = vec![labels.to_vec()];
        for (&v, fresh) in &block {
            let positions: Vec<usize> = labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == v)
                .map(|(i, _)| i)
                .collect();
            let perms = Permutation::all(fresh.len());
            let mut next = Vec::with_capacity(words.len() * perms.len());
            for w in &words {
                for p in &perms {
                    let mut w = w.clone();
                    for (k, &pos) in positions.iter().enumerate() {
                        w[pos] = fresh[p.images()[k] as usize - 1];
                    }
                    next.push(w);
                }
            }
            words = next;
        }
        for w in words {
            out.push((t.coeff, Monomial::from_parts(t.monomial.shape(), w)?));
        }
    }
    let lin = Identity::new(out, names)?;
    let g = lin.terms.iter().fold(0i64, |g, t| g.gcd(&t.coeff));
    if g > 1 {
        let terms = lin
            .terms
            .iter()
            .map(|t| (t.coeff / g, t.monomial.clone()))
            .collect();
        return Identity::new(terms, lin.names.clone());
    }
    Ok(lin)
}

// ---------------------------------------------------------------------------
// Parser

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(String),
    Int(u64),
    Star,
    Plus,
    Minus,
    Eq,
    LParen,
    RParen,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

impl Lexer {
    fn new(text: &str, line: usize) -> Result<Self, IdentityError> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_alphabetic() {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric()) {
                    i += 1;
                }
                toks.push((Tok::Var(chars[start..i].iter().collect()), col));
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let value = digits.parse::<u64>().map_err(|_| IdentityError::Syntax {
                    line,
                    column: col,
                    message: format!("integer `{digits}` is too large"),
                })?;
                toks.push((Tok::Int(value), col));
                continue;
            }
            let tok = match c {
                '*' => Tok::Star,
                '+' => Tok::Plus,
                '-' | '−' => Tok::Minus,
                '=' => Tok::Eq,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(IdentityError::Syntax {
                        line,
                        column: col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            toks.push((tok, col));
            i += 1;
        }
        toks.push((Tok::End, chars.len() + 1));
        Ok(Lexer { toks, pos: 0, line })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> IdentityError {
        IdentityError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }
}

struct Parser {
    lex: Lexer,
    names: Vec<String>,
}

impl Parser {
    fn var_index(&mut self, name: String) -> Result<Var, IdentityError> {
        if let Some(i) = self.names.iter().position(|n| *n == name) {
            return Ok((i + 1) as Var);
        }
        if self.names.len() >= MAX_VAR as usize {
            return Err(self.lex.error("too many variables"));
        }
        self.names.push(name);
        Ok(self.names.len() as Var)
    }

    fn identity(&mut self) -> Result<Vec<(i64, Monomial)>, IdentityError> {
        let mut terms = self.expr()?;
        if self.lex.peek() != &Tok::Eq {
            return Err(self.lex.error("expected `=`"));
        }
        self.lex.bump();
        let rhs = self.expr()?;
        if self.lex.peek() != &Tok::End {
            return Err(self.lex.error("unexpected input after identity"));
        }
        terms.extend(rhs.into_iter().map(|(c, m)| (-c, m)));
        Ok(terms)
    }

    fn expr(&mut self) -> Result<Vec<(i64, Monomial)>, IdentityError> {
        if self.lex.peek() == &Tok::Int(0) {
            self.lex.bump();
            return Ok(Vec::new());
        }
        let mut terms = Vec::new();
        let mut sign = 1i64;
        if self.lex.peek() == &Tok::Minus {
            self.lex.bump();
            sign = -1;
        }
        loop {
            let (c, m) = self.term()?;
            terms.push((sign * c, m));
            match self.lex.peek() {
                Tok::Plus => sign = 1,
                Tok::Minus => sign = -1,
                _ => break,
            }
            self.lex.bump();
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<(i64, Monomial), IdentityError> {
        let mut coeff = 1i64;
        if let Tok::Int(k) = *self.lex.peek() {
            if k == 0 {
                return Err(self.lex.error("zero coefficient"));
            }
            coeff = i64::try_from(k).map_err(|_| self.lex.error("coefficient too large"))?;
            self.lex.bump();
            if self.lex.peek() != &Tok::Star {
                return Err(self.lex.error("expected `*` after coefficient"));
            }
            self.lex.bump();
        }
        Ok((coeff, self.monomial()?))
    }

    fn monomial(&mut self) -> Result<Monomial, IdentityError> {
        let mut m = self.primary()?;
        while self.lex.peek() == &Tok::Star {
            self.lex.bump();
            let rhs = self.primary()?;
            m = m.product(&rhs).map_err(|e| self.lex.error(e.to_string()))?;
        }
        Ok(m)
    }

    fn primary(&mut self) -> Result<Monomial, IdentityError> {
        match self.lex.peek().clone() {
            Tok::Var(name) => {
                self.lex.bump();
                let v = self.var_index(name)?;
                Ok(Monomial::var(v)?)
            }
            Tok::LParen => {
                self.lex.bump();
                let m = self.monomial()?;
                if self.lex.peek() != &Tok::RParen {
                    return Err(self.lex.error("expected `)`"));
                }
                self.lex.bump();
                Ok(m)
            }
            Tok::End => Err(self.lex.error("unexpected end of input")),
            _ => Err(self.lex.error("expected a variable or `(`")),
        }
    }
}

fn parse_line(text: &str, line: usize) -> Result<Identity, IdentityError> {
    let mut p = Parser {
        lex: Lexer::new(text, line)?,
        names: Vec::new(),
    };
    let terms = p.identity()?;
    Identity::build(terms, p.names, line)
}

/// Parses a single identity.
pub fn parse_identity(text: &str) -> Result<Identity, IdentityError> {
    parse_line(text, 1)
}

/// Parses an identity file: one identity per line, blank lines and `#`
/// comments ignored.
pub fn parse_identities(text: &str) -> Result<Vec<Identity>, IdentityError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let body = l.split('#').next().unwrap_or("");
            !body.trim().is_empty()
        })
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

// ---------------------------------------------------------------------------
// Presets

pub const RIGHT_ALTERNATIVE: &str = "(x*y)*z + (x*z)*y - x*(y*z) - x*(z*y) = 0";
pub const LEFT_ALTERNATIVE: &str = "(x*y)*z + (y*x)*z - x*(y*z) - y*(x*z) = 0";
pub const ASSOCIATIVITY: &str = "(x*y)*z = x*(y*z)";
pub const DUAL_RIGHT_ALTERNATIVE: &str = "x*y*z + x*z*y = 0";
pub const DUAL_LEFT_ALTERNATIVE: &str = "x*y*z + y*x*z = 0";
pub const DUAL_ALTERNATIVE: &str = "x*y*z + y*x*z + z*x*y + x*z*y + y*z*x + z*y*x = 0";

const PRESETS: &[(&str, &[&str])] = &[
    ("right-alternative", &[RIGHT_ALTERNATIVE]),
    ("left-alternative", &[LEFT_ALTERNATIVE]),
    ("alternative", &[RIGHT_ALTERNATIVE, LEFT_ALTERNATIVE]),
    ("associative", &[ASSOCIATIVITY]),
    (
        "dual-right-alternative",
        &[ASSOCIATIVITY, DUAL_RIGHT_ALTERNATIVE],
    ),
    (
        "dual-left-alternative",
        &[ASSOCIATIVITY, DUAL_LEFT_ALTERNATIVE],
    ),
    ("dual-alternative", &[ASSOCIATIVITY, DUAL_ALTERNATIVE]),
];

/// A named quadratic operad given by degree-3 multilinear identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperadPreset {
    pub name: String,
    pub identities: Vec<Identity>,
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset(name: &str) -> Result<OperadPreset, IdentityError> {
    let (name, sources) =
        PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| IdentityError::UnknownPreset {
                name: name.to_string(),
                available: preset_names().into_iter().map(String::from).collect(),
            })?;
    let identities = sources
        .iter()
        .map(|s| parse_identity(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OperadPreset {
        name: name.to_string(),
        identities,
    })
}
