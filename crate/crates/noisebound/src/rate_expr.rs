//! Birth-rate expressions over nonnegative integer states.
//!
//! A rate expression is arithmetic over literals and the variables `x1..xN`,
//! plus the builtins
//!
//! ```text
//! hill_act(u, K, h) = u^h / (K^h + u^h)
//! hill_rep(u, K, h) = K^h / (K^h + u^h)
//! min(a, b, ...)    max(a, b, ...)
//! ```
//!
//! with `K > 0` and `h >= 1` required as literals. An expression belongs to
//! one component and may not reference that component's own variable.
//!
//! Besides evaluation, expressions support two static analyses: a
//! compositional sign calculus (is the rate nondecreasing / nonincreasing in
//! each regulator?) and certified affine bounds `eps <= f(x) <= A + B*s(x)`
//! where `s(x)` is the total copy number.

use serde::Serialize;
use thiserror::Error;

/// Values this close to zero (or closer) are treated as exactly zero.
pub const RATE_UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("rate for component {comp} references its own variable x{comp}")]
    SelfDependence { comp: usize },
    #[error("variable x{var} out of range (network has {n} components)")]
    BadIndex { var: usize, n: usize },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("rate evaluated to negative value {value} at state {state:?}")]
    NegativeRate { value: f64, state: Vec<u32> },
    #[error("rate evaluation was not finite at state {state:?}")]
    NonFinite { state: Vec<u32> },
}

/// Certified-superlinear growth: no affine bound A + B*s(x) can exist.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("expression grows superlinearly; no affine bound A + B*s(x) exists")]
pub struct UnboundedError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Builtin {
    HillAct,
    HillRep,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    /// 0-based variable index.
    Var(usize),
    Bin(BinOp, Box<Node>, Box<Node>),
    /// Hill calls keep K and h as literals; min/max ignore the two floats.
    Call(Builtin, Vec<Node>, f64, f64),
}

/// A parsed birth-rate function for one component.
///
/// Immutable after parsing; evaluation is read-only and safe to share
/// across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct RateExpr {
    root: Node,
    own_index: usize,
    n_components: usize,
    source: String,
}

/// Per-variable monotone direction, from the sign calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    /// Variable does not occur in the expression.
    Zero,
    /// Nondecreasing in this variable.
    Inc,
    /// Nonincreasing in this variable.
    Dec,
    /// Occurs, but no sound sign could be derived.
    Unknown,
}

/// Signs of one rate with respect to every component variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotonicitySignature {
    pub signs: Vec<Sign>,
}

/// Bounds `lower <= f(x)` and `f(x) <= upper_const + upper_slope * s(x)`.
///
/// When `rigorous` is set the bounds hold for every state in the lattice by
/// construction; otherwise they were estimated by sampling and are
/// diagnostics only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineBound {
    pub lower: f64,
    pub upper_const: f64,
    pub upper_slope: f64,
    pub rigorous: bool,
}

impl RateExpr {
    /// Parse `src` as the birth rate of component `own_index` (0-based) in a
    /// network of `n_components` components.
    pub fn parse(src: &str, own_index: usize, n_components: usize) -> Result<Self, ParseError> {
        assert!(own_index < n_components, "own_index out of range");
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let root = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(ParseError::Syntax {
                pos: p.pos,
                msg: "unexpected trailing input".into(),
            });
        }
        check_vars(&root, own_index, n_components)?;
        Ok(RateExpr {
            root,
            own_index,
            n_components,
            source: src.to_string(),
        })
    }

    pub fn own_index(&self) -> usize {
        self.own_index
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    /// The original source text.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluate at a lattice state. The state carries all `N` coordinates;
    /// coordinate `own_index` is never read.
    pub fn eval(&self, state: &[u32]) -> Result<f64, EvalError> {
        debug_assert_eq!(state.len(), self.n_components);
        let v = eval_node(&self.root, state).ok_or_else(|| EvalError::NonFinite {
            state: state.to_vec(),
        })?;
        if !v.is_finite() {
            return Err(EvalError::NonFinite {
                state: state.to_vec(),
            });
        }
        if v < 0.0 {
            return Err(EvalError::NegativeRate {
                value: v,
                state: state.to_vec(),
            });
        }
        if v < RATE_UNDERFLOW {
            return Ok(0.0);
        }
        Ok(v)
    }

    /// Sound per-variable signs. The entry for `own_index` is `Zero` by
    /// construction (self-references are rejected at parse time).
    pub fn monotonicity(&self) -> MonotonicitySignature {
        let mut signs = vec![Sign::Zero; self.n_components];
        let info = analyze(&self.root, self.n_components);
        for (j, s) in info.signs.iter().enumerate() {
            signs[j] = *s;
        }
        MonotonicitySignature { signs }
    }

    /// Certified affine bounds when the tree stays inside the analyzable
    /// fragment; sampled estimates (`rigorous = false`) otherwise.
    pub fn bounds(&self) -> Result<AffineBound, UnboundedError> {
        match certified_bounds(&self.root) {
            Some(Cert {
                lower,
                upper_const,
                upper_slope,
                superlinear,
                ..
            }) => {
                if superlinear {
                    return Err(UnboundedError);
                }
                Ok(AffineBound {
                    lower,
                    upper_const,
                    upper_slope,
                    rigorous: true,
                })
            }
            None => Ok(self.sampled_bounds()),
        }
    }

    /// Fallback bound estimation over [0, 200]^N: coarse grid plus 10^4
    /// uniform points, inflated by 10%.
    fn sampled_bounds(&self) -> AffineBound {
        use rand::{Rng, SeedableRng};
        let mut lo = f64::INFINITY;
        let mut f0 = 0.0;
        let mut samples: Vec<(f64, f64)> = Vec::new(); // (s(x), f(x))
        let record = |state: &[u32], lo: &mut f64, samples: &mut Vec<(f64, f64)>| {
            if let Ok(v) = self.eval(state) {
                let s: f64 = state.iter().map(|&c| c as f64).sum();
                *lo = lo.min(v);
                samples.push((s, v));
            }
        };
        // coarse grid
        let grid = [0u32, 1, 2, 5, 10, 25, 50, 100, 200];
        let n = self.n_components;
        let mut idx = vec![0usize; n];
        loop {
            let state: Vec<u32> = idx.iter().map(|&k| grid[k]).collect();
            if state.iter().all(|&c| c == 0) {
                f0 = self.eval(&state).unwrap_or(f64::INFINITY);
            }
            record(&state, &mut lo, &mut samples);
            let mut carry = true;
            for slot in idx.iter_mut() {
                if carry {
                    *slot += 1;
                    if *slot == grid.len() {
                        *slot = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_b0b5);
        for _ in 0..10_000 {
            let state: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=200)).collect();
            record(&state, &mut lo, &mut samples);
        }
        let mut slope: f64 = 0.0;
        for &(s, v) in &samples {
            if s > 0.0 {
                slope = slope.max((v - f0) / s);
            }
        }
        slope = slope.max(0.0);
        let mut constant: f64 = 0.0;
        for &(s, v) in &samples {
            constant = constant.max(v - slope * s);
        }
        AffineBound {
            lower: (lo * 0.9).max(0.0),
            upper_const: constant * 1.1,
            upper_slope: slope * 1.1,
            rigorous: false,
        }
    }
}

impl std::fmt::Display for RateExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        print_node(&self.root, 0, f)
    }
}

fn check_vars(node: &Node, own: usize, n: usize) -> Result<(), ParseError> {
    match node {
        Node::Const(_) => Ok(()),
        Node::Var(j) => {
            if *j >= n {
                Err(ParseError::BadIndex { var: j + 1, n })
            } else if *j == own {
                Err(ParseError::SelfDependence { comp: own + 1 })
            } else {
                Ok(())
            }
        }
        Node::Bin(_, a, b) => {
            check_vars(a, own, n)?;
            check_vars(b, own, n)
        }
        Node::Call(_, args, _, _) => {
            for a in args {
                check_vars(a, own, n)?;
            }
            Ok(())
        }
    }
}

fn eval_node(node: &Node, state: &[u32]) -> Option<f64> {
    let v = match node {
        Node::Const(c) => *c,
        Node::Var(j) => state[*j] as f64,
        Node::Bin(op, a, b) => {
            let a = eval_node(a, state)?;
            let b = eval_node(b, state)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return None;
                    }
                    a / b
                }
            }
        }
        Node::Call(builtin, args, k, h) => match builtin {
            Builtin::HillAct | Builtin::HillRep => {
                let u = eval_node(&args[0], state)?;
                let kh = k.powf(*h);
                let uh = u.powf(*h);
                let denom = kh + uh;
                if denom == 0.0 || !denom.is_finite() {
                    // K^h dominates overflowed u^h only in the rep case; treat
                    // inf/inf as the limiting value instead of erroring.
                    if uh.is_infinite() {
                        match builtin {
                            Builtin::HillAct => 1.0,
                            _ => 0.0,
                        }
                    } else {
                        return None;
                    }
                } else {
                    match builtin {
                        Builtin::HillAct => uh / denom,
                        _ => kh / denom,
                    }
                }
            }
            Builtin::Min => {
                let mut m = f64::INFINITY;
                for a in args {
                    m = m.min(eval_node(a, state)?);
                }
                m
            }
            Builtin::Max => {
                let mut m = f64::NEG_INFINITY;
                for a in args {
                    m = m.max(eval_node(a, state)?);
                }
                m
            }
        },
    };
    if v.is_nan() {
        None
    } else {
        Some(v)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut node = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    node = Node::Bin(BinOp::Add, Box::new(node), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    node = Node::Bin(BinOp::Sub, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut node = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    node = Node::Bin(BinOp::Mul, Box::new(node), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    node = Node::Bin(BinOp::Div, Box::new(node), Box::new(rhs));
                }
                _ => return Ok(node),
            }
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("expected a number, variable, call, or '('")),
            Some(b'(') => {
                self.pos += 1;
                let node = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(node)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.err(format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' {
                self.pos += 1;
            } else {
                break;
            }
        }
        // optional exponent
        if let Some(b'e' | b'E') = self.peek() {
            let mark = self.pos;
            self.pos += 1;
            if let Some(b'+' | b'-') = self.peek() {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Node::Const(v)),
            _ => Err(ParseError::Syntax {
                pos: start,
                msg: format!("invalid number literal '{text}'"),
            }),
        }
    }

    fn ident(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        // variable: 'x' followed by a positive integer
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|c| c.is_ascii_digit()) {
                if rest.starts_with('0') {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("variable indices are 1-based, got '{name}'"),
                    });
                }
                let idx: usize = rest.parse().map_err(|_| ParseError::Syntax {
                    pos: start,
                    msg: format!("variable index too large in '{name}'"),
                })?;
                return Ok(Node::Var(idx - 1));
            }
        }
        let builtin = match name {
            "hill_act" => Builtin::HillAct,
            "hill_rep" => Builtin::HillRep,
            "min" => Builtin::Min,
            "max" => Builtin::Max,
            _ => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unknown function or variable '{name}'"),
                })
            }
        };
        self.skip_ws();
        if self.peek() != Some(b'(') {
            return Err(self.err(format!("expected '(' after '{name}'")));
        }
        self.pos += 1;
        let mut args = Vec::new();
        loop {
            args.push(self.expr()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err("expected ',' or ')' in argument list")),
            }
        }
        match builtin {
            Builtin::HillAct | Builtin::HillRep => {
                if args.len() != 3 {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("{name} takes exactly 3 arguments"),
                    });
                }
                let k = literal_value(&args[1]).ok_or_else(|| ParseError::Syntax {
                    pos: start,
                    msg: format!("{name}: K must be a literal"),
                })?;
                let h = literal_value(&args[2]).ok_or_else(|| ParseError::Syntax {
                    pos: start,
                    msg: format!("{name}: h must be a literal"),
                })?;
                if k <= 0.0 {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("{name}: K must be > 0"),
                    });
                }
                if h < 1.0 {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("{name}: h must be >= 1"),
                    });
                }
                let arg = args.swap_remove(0);
                Ok(Node::Call(builtin, vec![arg], k, h))
            }
            Builtin::Min | Builtin::Max => {
                if args.len() < 2 {
                    return Err(ParseError::Syntax {
                        pos: start,
                        msg: format!("{name} takes at least 2 arguments"),
                    });
                }
                Ok(Node::Call(builtin, args, 0.0, 0.0))
            }
        }
    }
}

fn literal_value(node: &Node) -> Option<f64> {
    match node {
        Node::Const(c) => Some(*c),
        _ => None,
    }
}

// Precedence levels: 0 = sum, 1 = product, 2 = atom.
fn print_node(node: &Node, parent_level: u8, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
    let level = match node {
        Node::Bin(BinOp::Add | BinOp::Sub, ..) => 0,
        Node::Bin(BinOp::Mul | BinOp::Div, ..) => 1,
        _ => 2,
    };
    let parens = level < parent_level;
    if parens {
        write!(f, "(")?;
    }
    match node {
        Node::Const(c) => write!(f, "{c}")?,
        Node::Var(j) => write!(f, "x{}", j + 1)?,
        Node::Bin(op, a, b) => {
            let (sym, lhs_level, rhs_level) = match op {
                BinOp::Add => ("+", 0, 1),
                BinOp::Sub => ("-", 0, 1),
                BinOp::Mul => ("*", 1, 2),
                BinOp::Div => ("/", 1, 2),
            };
            print_node(a, lhs_level, f)?;
            write!(f, " {sym} ")?;
            // RHS of - and / needs the next level to preserve the tree shape.
            print_node(b, rhs_level, f)?;
        }
        Node::Call(builtin, args, k, h) => {
            let name = match builtin {
                Builtin::HillAct => "hill_act",
                Builtin::HillRep => "hill_rep",
                Builtin::Min => "min",
                Builtin::Max => "max",
            };
            write!(f, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                print_node(a, 0, f)?;
            }
            if matches!(builtin, Builtin::HillAct | Builtin::HillRep) {
                write!(f, ", {k}, {h}")?;
            }
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sign calculus
// ---------------------------------------------------------------------------

/// Range of a subexpression over all lattice states, with +/- infinity
/// allowed at the endpoints.
#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn nonneg(&self) -> bool {
        self.lo >= 0.0
    }
    fn excludes_zero(&self) -> bool {
        self.lo > 0.0 || self.hi < 0.0
    }
}

struct Info {
    signs: Vec<Sign>,
    range: Range,
}

// Product with the convention 0 * inf = 0, which is exact for endpoint
// suprema of products of intervals.
fn mul_ext(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn range_mul(a: Range, b: Range) -> Range {
    let cands = [
        mul_ext(a.lo, b.lo),
        mul_ext(a.lo, b.hi),
        mul_ext(a.hi, b.lo),
        mul_ext(a.hi, b.hi),
    ];
    Range {
        lo: cands.iter().copied().fold(f64::INFINITY, f64::min),
        hi: cands.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn flip(s: Sign) -> Sign {
    match s {
        Sign::Inc => Sign::Dec,
        Sign::Dec => Sign::Inc,
        other => other,
    }
}

fn add_signs(a: Sign, b: Sign) -> Sign {
    use Sign::*;
    match (a, b) {
        (Zero, s) | (s, Zero) => s,
        (Inc, Inc) => Inc,
        (Dec, Dec) => Dec,
        _ => Unknown,
    }
}

// Valid for a product of factors known nonnegative: Zero acts as a
// same-direction neutral element.
fn mul_signs_nonneg(a: Sign, b: Sign) -> Sign {
    use Sign::*;
    match (a, b) {
        (Zero, Zero) => Zero,
        (Zero, s) | (s, Zero) => s,
        (Inc, Inc) => Inc,
        (Dec, Dec) => Dec,
        _ => Unknown,
    }
}

fn analyze(node: &Node, n: usize) -> Info {
    match node {
        Node::Const(c) => Info {
            signs: vec![Sign::Zero; n],
            range: Range { lo: *c, hi: *c },
        },
        Node::Var(j) => {
            let mut signs = vec![Sign::Zero; n];
            signs[*j] = Sign::Inc;
            Info {
                signs,
                range: Range {
                    lo: 0.0,
                    hi: f64::INFINITY,
                },
            }
        }
        Node::Bin(op, a, b) => {
            let ia = analyze(a, n);
            let ib = analyze(b, n);
            match op {
                BinOp::Add => Info {
                    signs: zip_signs(&ia.signs, &ib.signs, add_signs),
                    range: Range {
                        lo: ia.range.lo + ib.range.lo,
                        hi: ia.range.hi + ib.range.hi,
                    },
                },
                BinOp::Sub => Info {
                    signs: ia
                        .signs
                        .iter()
                        .zip(&ib.signs)
                        .map(|(&sa, &sb)| add_signs(sa, flip(sb)))
                        .collect(),
                    range: Range {
                        lo: ia.range.lo - ib.range.hi,
                        hi: ia.range.hi - ib.range.lo,
                    },
                },
                BinOp::Mul => {
                    let range = range_mul(ia.range, ib.range);
                    let signs = if ia.range.nonneg() && ib.range.nonneg() {
                        zip_signs(&ia.signs, &ib.signs, mul_signs_nonneg)
                    } else if let Node::Const(c) = **a {
                        // negative constant factor flips directions
                        ib.signs
                            .iter()
                            .map(|&s| if c >= 0.0 { s } else { flip(s) })
                            .collect()
                    } else if let Node::Const(c) = **b {
                        ia.signs
                            .iter()
                            .map(|&s| if c >= 0.0 { s } else { flip(s) })
                            .collect()
                    } else {
                        unknown_where_present(&ia.signs, &ib.signs)
                    };
                    Info { signs, range }
                }
                BinOp::Div => {
                    // a / b = a * (1/b); 1/b is direction-flipping wherever
                    // b keeps a fixed sign away from zero.
                    if ib.range.excludes_zero() {
                        let inv_range = Range {
                            lo: recip_lo(ib.range),
                            hi: recip_hi(ib.range),
                        };
                        let inv_signs: Vec<Sign> = ib.signs.iter().map(|&s| flip(s)).collect();
                        let range = range_mul(ia.range, inv_range);
                        let signs = if ia.range.nonneg() && inv_range.nonneg() {
                            zip_signs(&ia.signs, &inv_signs, mul_signs_nonneg)
                        } else if let Node::Const(c) = **a {
                            inv_signs
                                .iter()
                                .map(|&s| if c >= 0.0 { s } else { flip(s) })
                                .collect()
                        } else {
                            unknown_where_present(&ia.signs, &inv_signs)
                        };
                        Info { signs, range }
                    } else {
                        Info {
                            signs: unknown_where_present(&ia.signs, &ib.signs),
                            range: Range {
                                lo: f64::NEG_INFINITY,
                                hi: f64::INFINITY,
                            },
                        }
                    }
                }
            }
        }
        Node::Call(builtin, args, ..) => match builtin {
            Builtin::HillAct | Builtin::HillRep => {
                let iu = analyze(&args[0], n);
                if iu.range.nonneg() {
                    let signs = iu
                        .signs
                        .iter()
                        .map(|&s| match builtin {
                            Builtin::HillAct => s,
                            _ => flip(s),
                        })
                        .collect();
                    Info {
                        signs,
                        range: Range { lo: 0.0, hi: 1.0 },
                    }
                } else {
                    Info {
                        signs: iu
                            .signs
                            .iter()
                            .map(|&s| if s == Sign::Zero { Sign::Zero } else { Sign::Unknown })
                            .collect(),
                        range: Range {
                            lo: f64::NEG_INFINITY,
                            hi: f64::INFINITY,
                        },
                    }
                }
            }
            Builtin::Min | Builtin::Max => {
                let infos: Vec<Info> = args.iter().map(|a| analyze(a, n)).collect();
                let mut signs = infos[0].signs.clone();
                for info in &infos[1..] {
                    signs = zip_signs(&signs, &info.signs, add_signs);
                }
                let (lo, hi) = match builtin {
                    Builtin::Min => (
                        infos.iter().map(|i| i.range.lo).fold(f64::INFINITY, f64::min),
                        infos.iter().map(|i| i.range.hi).fold(f64::INFINITY, f64::min),
                    ),
                    _ => (
                        infos
                            .iter()
                            .map(|i| i.range.lo)
                            .fold(f64::NEG_INFINITY, f64::max),
                        infos
                            .iter()
                            .map(|i| i.range.hi)
                            .fold(f64::NEG_INFINITY, f64::max),
                    ),
                };
                Info {
                    signs,
                    range: Range { lo, hi },
                }
            }
        },
    }
}

fn recip_lo(r: Range) -> f64 {
    if r.hi.is_infinite() {
        0.0
    } else {
        1.0 / r.hi
    }
}

fn recip_hi(r: Range) -> f64 {
    if r.lo.is_infinite() {
        0.0
    } else {
        1.0 / r.lo
    }
}

fn zip_signs(a: &[Sign], b: &[Sign], f: fn(Sign, Sign) -> Sign) -> Vec<Sign> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

fn unknown_where_present(a: &[Sign], b: &[Sign]) -> Vec<Sign> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            if x == Sign::Zero && y == Sign::Zero {
                Sign::Zero
            } else {
                Sign::Unknown
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Certified affine bounds
// ---------------------------------------------------------------------------

/// Bound data for the analyzable fragment: constants, variables, +, *,
/// / with positively-bounded denominators, hill builtins, min, max. All
/// values are nonnegative within this fragment.
struct Cert {
    lower: f64,
    upper_const: f64,
    /// Slope with respect to s(x).
    upper_slope: f64,
    /// Variables along which the value grows at least linearly.
    grows: Vec<usize>,
    /// A product of two growing factors was detected somewhere below.
    superlinear: bool,
}

fn certified_bounds(node: &Node) -> Option<Cert> {
    match node {
        Node::Const(c) => {
            if *c < 0.0 {
                return None;
            }
            Some(Cert {
                lower: *c,
                upper_const: *c,
                upper_slope: 0.0,
                grows: vec![],
                superlinear: false,
            })
        }
        Node::Var(j) => Some(Cert {
            lower: 0.0,
            upper_const: 0.0,
            upper_slope: 1.0,
            grows: vec![*j],
            superlinear: false,
        }),
        Node::Bin(BinOp::Add, a, b) => {
            let ca = certified_bounds(a)?;
            let cb = certified_bounds(b)?;
            let mut grows = ca.grows;
            for j in cb.grows {
                if !grows.contains(&j) {
                    grows.push(j);
                }
            }
            Some(Cert {
                lower: ca.lower + cb.lower,
                upper_const: ca.upper_const + cb.upper_const,
                upper_slope: ca.upper_slope + cb.upper_slope,
                grows,
                superlinear: ca.superlinear || cb.superlinear,
            })
        }
        Node::Bin(BinOp::Mul, a, b) => {
            let ca = certified_bounds(a)?;
            let cb = certified_bounds(b)?;
            if !ca.grows.is_empty() && !cb.grows.is_empty() {
                // both factors grow linearly somewhere: provably superlinear
                return Some(Cert {
                    lower: 0.0,
                    upper_const: 0.0,
                    upper_slope: 0.0,
                    grows: vec![],
                    superlinear: true,
                });
            }
            // at least one factor is bounded (slope 0); bound the product by
            // scaling the other side
            let (bounded, other) = if ca.upper_slope == 0.0 {
                (&ca, &cb)
            } else if cb.upper_slope == 0.0 {
                (&cb, &ca)
            } else {
                return None;
            };
            let scale = bounded.upper_const;
            let mut grows = Vec::new();
            if bounded.lower > 0.0 {
                grows = other.grows.clone();
            }
            if other.lower > 0.0 {
                for j in &bounded.grows {
                    if !grows.contains(j) {
                        grows.push(*j);
                    }
                }
            }
            Some(Cert {
                lower: ca.lower * cb.lower,
                upper_const: other.upper_const * scale,
                upper_slope: other.upper_slope * scale,
                grows,
                superlinear: ca.superlinear || cb.superlinear,
            })
        }
        Node::Bin(BinOp::Div, a, b) => {
            let ca = certified_bounds(a)?;
            let cb = certified_bounds(b)?;
            // only denominators bounded away from zero are certifiable
            if cb.lower <= 0.0 {
                return None;
            }
            let lower = if cb.upper_slope == 0.0 {
                ca.lower / cb.upper_const
            } else {
                0.0 // denominator unbounded: infimum of the quotient is 0
            };
            let grows = if cb.upper_slope == 0.0 {
                ca.grows.clone()
            } else {
                vec![]
            };
            Some(Cert {
                lower,
                upper_const: ca.upper_const / cb.lower,
                upper_slope: ca.upper_slope / cb.lower,
                grows,
                superlinear: ca.superlinear || cb.superlinear,
            })
        }
        Node::Bin(BinOp::Sub, ..) => None,
        Node::Call(builtin, args, k, h) => match builtin {
            Builtin::HillAct | Builtin::HillRep => {
                let cu = certified_bounds(&args[0])?;
                let hill = |u: f64| -> f64 {
                    let kh = k.powf(*h);
                    let uh = u.powf(*h);
                    match builtin {
                        Builtin::HillAct => {
                            if uh.is_infinite() {
                                1.0
                            } else {
                                uh / (kh + uh)
                            }
                        }
                        _ => {
                            if uh.is_infinite() {
                                0.0
                            } else {
                                kh / (kh + uh)
                            }
                        }
                    }
                };
                let u_hi = if cu.upper_slope == 0.0 {
                    cu.upper_const
                } else {
                    f64::INFINITY
                };
                let (lower, upper) = match builtin {
                    Builtin::HillAct => (hill(cu.lower), hill(u_hi)),
                    _ => (hill(u_hi), hill(cu.lower)),
                };
                Some(Cert {
                    lower,
                    upper_const: upper,
                    upper_slope: 0.0,
                    grows: vec![],
                    superlinear: cu.superlinear,
                })
            }
            Builtin::Min => {
                let certs: Vec<Cert> = args
                    .iter()
                    .map(certified_bounds)
                    .collect::<Option<Vec<_>>>()?;
                let lower = certs.iter().map(|c| c.lower).fold(f64::INFINITY, f64::min);
                // any argument's upper bound also bounds the min; prefer the
                // flattest one
                let best = certs
                    .iter()
                    .min_by(|x, y| {
                        (x.upper_slope, x.upper_const)
                            .partial_cmp(&(y.upper_slope, y.upper_const))
                            .unwrap()
                    })
                    .unwrap();
                let mut grows: Vec<usize> = certs[0].grows.clone();
                for c in &certs[1..] {
                    grows.retain(|j| c.grows.contains(j));
                }
                Some(Cert {
                    lower,
                    upper_const: best.upper_const,
                    upper_slope: best.upper_slope,
                    grows,
                    superlinear: certs.iter().any(|c| c.superlinear),
                })
            }
            Builtin::Max => {
                let certs: Vec<Cert> = args
                    .iter()
                    .map(certified_bounds)
                    .collect::<Option<Vec<_>>>()?;
                let lower = certs
                    .iter()
                    .map(|c| c.lower)
                    .fold(f64::NEG_INFINITY, f64::max);
                let upper_const = certs
                    .iter()
                    .map(|c| c.upper_const)
                    .fold(f64::NEG_INFINITY, f64::max);
                let upper_slope = certs
                    .iter()
                    .map(|c| c.upper_slope)
                    .fold(f64::NEG_INFINITY, f64::max);
                let mut grows = Vec::new();
                for c in &certs {
                    for j in &c.grows {
                        if !grows.contains(j) {
                            grows.push(*j);
                        }
                    }
                }
                Some(Cert {
                    lower,
                    upper_const,
                    upper_slope,
                    grows,
                    superlinear: certs.iter().any(|c| c.superlinear),
                })
            }
        },
    }
}
