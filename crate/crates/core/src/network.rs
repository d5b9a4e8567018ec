//! Glass networks given as focal-point truth tables.
//!
//! A network of dimension `n` assigns to every orthant of `R^n` a focal
//! point `f`; inside that orthant every trajectory relaxes along a straight
//! line towards `f`. Orthants are addressed by [`OrthantCode`], whose bit `i`
//! is set exactly when `y_i > 0`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported dimension. The focal table has `2^n` rows.
pub const MAX_DIM: usize = 16;

const MAGIC: &str = "glassnet";
const VERSION: &str = "1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unsupported dimension {0} (expected 1..={MAX_DIM})")]
    Dimension(usize),
    #[error("row count mismatch: expected {expected} orthant rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("duplicate row for orthant {0}")]
    DuplicateRow(OrthantCode),
    #[error("missing row for orthant {0}")]
    MissingRow(OrthantCode),
    #[error("line {line}: non-numeric focal entry `{token}`")]
    NonNumeric { line: usize, token: String },
    #[error("Condition 1 violated: focal component y{} is zero in orthant {code}", index + 1)]
    ZeroFocal { code: OrthantCode, index: usize },
    #[error(
        "Condition 2 violated: component y{} differs between orthants {low} and {high}",
        index + 1
    )]
    SelfInput {
        index: usize,
        low: OrthantCode,
        high: OrthantCode,
    },
    #[error("invalid orthant code `{0}`")]
    BadCode(String),
}

/// Sign pattern of an orthant. Variable 1 is the leftmost character of the
/// bitstring and the most significant bit of the packed value, so the
/// derived ordering is lexicographic on bitstrings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrthantCode {
    dim: u8,
    bits: u32,
}

impl OrthantCode {
    pub fn new(dim: usize, bits: u32) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension out of range");
        assert!(bits < (1u32 << dim), "code does not fit in dimension");
        Self {
            dim: dim as u8,
            bits,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let packed = bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        Self::new(bits.len(), packed)
    }

    /// Orthant containing `y`, or `None` when some component is zero.
    pub fn of_point(y: &[f64]) -> Option<Self> {
        if y.iter().any(|v| *v == 0.0 || v.is_nan()) {
            return None;
        }
        let bools: Vec<bool> = y.iter().map(|v| *v > 0.0).collect();
        Some(Self::from_bools(&bools))
    }

    /// Every code of the given dimension in ascending order.
    pub fn all(dim: usize) -> impl Iterator<Item = OrthantCode> {
        (0..(1u32 << dim)).map(move |b| OrthantCode::new(dim, b))
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Row index of this code in a table ordered `00..0, 00..1, ...`.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    fn mask(&self, i: usize) -> u32 {
        debug_assert!(i < self.dim());
        1u32 << (self.dim() - 1 - i)
    }

    /// Value of the step variable for `y_{i+1}`.
    pub fn bit(&self, i: usize) -> bool {
        self.bits & self.mask(i) != 0
    }

    /// `+1.0` when `y_{i+1} > 0` in this orthant, `-1.0` otherwise.
    pub fn sign(&self, i: usize) -> f64 {
        if self.bit(i) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn signs(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.sign(i)).collect()
    }

    pub fn flip(&self, i: usize) -> Self {
        Self {
            dim: self.dim,
            bits: self.bits ^ self.mask(i),
        }
    }

    pub fn hamming(&self, other: &Self) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// The single variable in which two adjacent codes differ.
    pub fn differing_bit(&self, other: &Self) -> Option<usize> {
        if self.dim != other.dim || self.hamming(other) != 1 {
            return None;
        }
        let x = self.bits ^ other.bits;
        Some(self.dim() - 1 - x.trailing_zeros() as usize)
    }

    /// Whether `y` lies in the closed orthant.
    pub fn contains_closed(&self, y: &[f64]) -> bool {
        y.len() == self.dim() && y.iter().enumerate().all(|(i, v)| v * self.sign(i) >= 0.0)
    }
}

impl fmt::Display for OrthantCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for OrthantCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrthantCode({self})")
    }
}

impl FromStr for OrthantCode {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_DIM {
            return Err(NetworkError::BadCode(s.to_string()));
        }
        let mut bools = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bools.push(false),
                '1' => bools.push(true),
                _ => return Err(NetworkError::BadCode(s.to_string())),
            }
        }
        Ok(Self::from_bools(&bools))
    }
}

/// The hyperplane `y_{variable+1} = 0` crossed from orthant `from` into
/// orthant `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wall {
    pub variable: usize,
    pub from: OrthantCode,
    pub to: OrthantCode,
}

impl Wall {
    pub fn between(from: OrthantCode, to: OrthantCode) -> Option<Self> {
        from.differing_bit(&to)
            .map(|variable| Self { variable, from, to })
    }

    pub fn dim(&self) -> usize {
        self.to.dim()
    }

    /// Signs of the non-wall variables, in ascending index order.
    pub fn reduced_signs(&self) -> Vec<f64> {
        (0..self.dim())
            .filter(|i| *i != self.variable)
            .map(|i| self.to.sign(i))
            .collect()
    }

    /// Inserts a zero at the wall coordinate.
    pub fn embed(&self, reduced: &[f64]) -> Vec<f64> {
        assert_eq!(reduced.len() + 1, self.dim());
        let mut y = reduced.to_vec();
        y.insert(self.variable, 0.0);
        y
    }

    /// Drops the wall coordinate.
    pub fn reduce(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .enumerate()
            .filter(|(i, _)| *i != self.variable)
            .map(|(_, v)| *v)
            .collect()
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{} (y{})", self.from, self.to, self.variable + 1)
    }
}

/// Parses a comma-separated list of bitstrings such as `0101,0111,1111`.
pub fn parse_code_list(s: &str) -> Result<Vec<OrthantCode>, NetworkError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// A Glass network `dy/dt = -y + F(step(y))`.
///
/// Immutable once constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct GlassNetwork {
    n: usize,
    focal: Vec<f64>,
    boolean: bool,
    self_input_checked: bool,
}

impl GlassNetwork {
    /// Builds a network from one focal vector per orthant (indexed by
    /// [`OrthantCode::index`]), enforcing both Conditions.
    pub fn new(n: usize, rows: Vec<Vec<f64>>) -> Result<Self, NetworkError> {
        Self::with_options(n, rows, ParseOptions::default())
    }

    pub fn with_options(
        n: usize,
        rows: Vec<Vec<f64>>,
        opts: ParseOptions,
    ) -> Result<Self, NetworkError> {
        let net = Self::unchecked(n, rows)?;
        let report = net.validate_conditions();
        if let Some(w) = report.condition1.first() {
            return Err(NetworkError::ZeroFocal {
                code: w.code,
                index: w.index,
            });
        }
        if opts.require_condition2 {
            if let Some(w) = report.condition2.first() {
                return Err(NetworkError::SelfInput {
                    index: w.index,
                    low: w.low,
                    high: w.high,
                });
            }
        }
        Ok(Self {
            self_input_checked: opts.require_condition2,
            ..net
        })
    }

    /// Builds a network checking only the table shape. Used to inspect
    /// tables that break Condition 1 or 2.
    pub fn unchecked(n: usize, rows: Vec<Vec<f64>>) -> Result<Self, NetworkError> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(NetworkError::Dimension(n));
        }
        let expected = 1usize << n;
        if rows.len() != expected {
            return Err(NetworkError::RowCount {
                expected,
                found: rows.len(),
            });
        }
        let mut focal = Vec::with_capacity(n * expected);
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(NetworkError::Syntax {
                    line: idx + 1,
                    msg: format!("focal vector has {} entries, expected {n}", row.len()),
                });
            }
            focal.extend_from_slice(row);
        }
        let boolean = focal.iter().all(|v| *v == 1.0 || *v == -1.0);
        Ok(Self {
            n,
            focal,
            boolean,
            self_input_checked: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// True when every focal entry is `+1` or `-1`.
    pub fn is_boolean(&self) -> bool {
        self.boolean
    }

    /// Whether Condition 2 was enforced at construction.
    pub fn self_input_checked(&self) -> bool {
        self.self_input_checked
    }

    pub fn focal_point(&self, code: OrthantCode) -> &[f64] {
        assert_eq!(code.dim(), self.n, "orthant code dimension mismatch");
        let start = code.index() * self.n;
        &self.focal[start..start + self.n]
    }

    /// Largest focal magnitude over all orthants and components.
    pub fn focal_bound(&self) -> f64 {
        self.focal.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Checks Condition 1 (no zero focal component) by scanning the table,
    /// and Condition 2 (no self-input) over all `n * 2^(n-1)` toggle pairs.
    pub fn validate_conditions(&self) -> ValidationReport {
        let mut condition1 = Vec::new();
        let mut condition2 = Vec::new();
        for code in OrthantCode::all(self.n) {
            let f = self.focal_point(code);
            for (i, v) in f.iter().enumerate() {
                if *v == 0.0 {
                    condition1.push(ZeroWitness { code, index: i });
                }
            }
            for i in 0..self.n {
                if code.bit(i) {
                    continue;
                }
                let high = code.flip(i);
                let a = f[i];
                let b = self.focal_point(high)[i];
                if a != b {
                    condition2.push(SelfInputWitness {
                        index: i,
                        low: code,
                        high,
                        low_value: a,
                        high_value: b,
                    });
                }
            }
        }
        ValidationReport {
            condition1,
            condition2,
        }
    }

    /// Serializes to the line-oriented network format, rows in ascending
    /// code order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} {VERSION}\nn {}\n", self.n);
        for code in OrthantCode::all(self.n) {
            out.push_str(&code.to_string());
            for v in self.focal_point(code) {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject tables in which some `F_i` depends on `y_i`.
    pub require_condition2: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            require_condition2: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroWitness {
    pub code: OrthantCode,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfInputWitness {
    pub index: usize,
    pub low: OrthantCode,
    pub high: OrthantCode,
    pub low_value: f64,
    pub high_value: f64,
}

/// Outcome of [`GlassNetwork::validate_conditions`]; empty witness lists
/// mean the condition holds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub condition1: Vec<ZeroWitness>,
    pub condition2: Vec<SelfInputWitness>,
}

impl ValidationReport {
    pub fn condition1_holds(&self) -> bool {
        self.condition1.is_empty()
    }

    pub fn condition2_holds(&self) -> bool {
        self.condition2.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "pass" } else { "fail" };
        writeln!(
            f,
            "Condition 1: {}, Condition 2: {}",
            verdict(self.condition1_holds()),
            verdict(self.condition2_holds())
        )?;
        for w in &self.condition1 {
            writeln!(f, "  condition 1 witness: orthant {} component y{} = 0", w.code, w.index + 1)?;
        }
        for w in &self.condition2 {
            writeln!(
                f,
                "  condition 2 witness: y{}: F({}) = {} but F({}) = {}",
                w.index + 1,
                w.low,
                w.low_value,
                w.high,
                w.high_value
            )?;
        }
        Ok(())
    }
}

/// Parses the network file format with both Conditions enforced.
pub fn parse_network(text: &str) -> Result<GlassNetwork, NetworkError> {
    parse_network_with(text, ParseOptions::default())
}

pub fn parse_network_with(text: &str, opts: ParseOptions) -> Result<GlassNetwork, NetworkError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or(NetworkError::Syntax {
        line: 1,
        msg: "empty file".into(),
    })?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some(MAGIC) || toks.next() != Some(VERSION) || toks.next().is_some() {
        return Err(NetworkError::Syntax {
            line: ln,
            msg: format!("expected header `{MAGIC} {VERSION}`"),
        });
    }

    let (ln, dim_line) = lines.next().ok_or(NetworkError::Syntax {
        line: ln + 1,
        msg: "missing dimension line".into(),
    })?;
    let mut toks = dim_line.split_whitespace();
    let n = match (toks.next(), toks.next(), toks.next()) {
        (Some("n"), Some(v), None) => v.parse::<usize>().map_err(|_| NetworkError::Syntax {
            line: ln,
            msg: format!("bad dimension `{v}`"),
        })?,
        _ => {
            return Err(NetworkError::Syntax {
                line: ln,
                msg: "expected `n <dimension>`".into(),
            })
        }
    };
    if !(1..=MAX_DIM).contains(&n) {
        return Err(NetworkError::Dimension(n));
    }

    let expected = 1usize << n;
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; expected];
    let mut found = 0usize;
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        let code_tok = toks.next().unwrap_or_default();
        let code: OrthantCode = code_tok.parse().map_err(|_| NetworkError::Syntax {
            line: ln,
            msg: format!("bad orthant code `{code_tok}`"),
        })?;
        if code.dim() != n {
            return Err(NetworkError::Syntax {
                line: ln,
                msg: format!("orthant code `{code}` has length {}, expected {n}", code.dim()),
            });
        }
        let mut row = Vec::with_capacity(n);
        for tok in toks {
            let v: f64 = tok.parse().map_err(|_| NetworkError::NonNumeric {
                line: ln,
                token: tok.to_string(),
            })?;
            if !v.is_finite() {
                return Err(NetworkError::NonNumeric {
                    line: ln,
                    token: tok.to_string(),
                });
            }
            row.push(v);
        }
        if row.len() != n {
            return Err(NetworkError::Syntax {
                line: ln,
                msg: format!("expected {n} focal entries, found {}", row.len()),
            });
        }
        found += 1;
        let slot = &mut rows[code.index()];
        if slot.is_some() {
            return Err(NetworkError::DuplicateRow(code));
        }
        *slot = Some(row);
    }
    if found != expected {
        return Err(NetworkError::RowCount { expected, found });
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or(NetworkError::MissingRow(OrthantCode::new(n, i as u32))))
        .collect::<Result<Vec<_>, _>>()?;
    GlassNetwork::with_options(n, rows, opts)
}
