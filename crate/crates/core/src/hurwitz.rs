//! Hurwitz–Radon arithmetic.
//!
//! Every positive integer factors uniquely as `n = 2^(4a+b) (2c+1)` with
//! `0 ≤ b ≤ 3`, and the Hurwitz–Radon number is `ρ(n) = 8a + 2^b`. The
//! generalized numbers `ρ⁽¹⁾`, `ρ⁽²⁾` of the classical Lie algebras in their
//! standard representations are closed forms in `ρ` and the dyadic valuation;
//! [`table_value`] evaluates them.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{format_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzDecomposition {
    pub n: u64,
    pub a: u32,
    pub b: u32,
    pub c: u64,
}

/// Dyadic valuation `ord₂(n)`.
pub fn ord2(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::NonPositive("0".into()));
    }
    Ok(n.trailing_zeros())
}

pub fn decompose(n: u64) -> Result<HurwitzDecomposition> {
    let v = ord2(n)?;
    Ok(HurwitzDecomposition {
        n,
        a: v / 4,
        b: v % 4,
        c: (n >> v) / 2,
    })
}

/// `ρ(n) = 8a + 2^b`.
pub fn rho(n: u64) -> Result<u64> {
    let d = decompose(n)?;
    Ok(8 * u64::from(d.a) + (1u64 << d.b))
}

/// `ρ` extended to positive rationals: `ρ(q)` on integers and `0` otherwise.
/// Table rows such as `ρ(N/2) + 1` are evaluated through this.
pub fn rho_extended(q: &Rational) -> Result<u64> {
    if !q.is_positive() {
        return Err(Error::NonPositive(format_rational(q)));
    }
    if !q.is_integer() {
        return Ok(0);
    }
    let n = q.to_integer().to_u64().ok_or_else(|| {
        Error::Unsupported(format!("{} does not fit in 64 bits", format_rational(q)))
    })?;
    rho(n)
}

fn rho_of_fraction(n: u64, d: u64) -> u64 {
    if n.is_multiple_of(d) {
        rho(n / d).expect("positive")
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DivisionAlgebra {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
    #[serde(rename = "H")]
    Quaternion,
}

impl DivisionAlgebra {
    fn symbol(self) -> &'static str {
        match self {
            DivisionAlgebra::Real => "R",
            DivisionAlgebra::Complex => "C",
            DivisionAlgebra::Quaternion => "H",
        }
    }

    fn parse(text: &str) -> Option<Self> {
        match text.trim() {
            "R" | "ℝ" | "r" => Some(DivisionAlgebra::Real),
            "C" | "ℂ" | "c" => Some(DivisionAlgebra::Complex),
            "H" | "ℍ" | "h" => Some(DivisionAlgebra::Quaternion),
            _ => None,
        }
    }
}

/// A classical Lie algebra with its standard representation, named by the
/// size parameters of its catalog row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalPairKind {
    /// `so(N,N)`
    SoNN(u64),
    /// `gl(N,ℝ)`
    GlReal(u64),
    /// `sp(N,ℝ)`
    SpReal(u64),
    /// `sp(N,ℂ)`
    SpComplex(u64),
    /// `sp(N,N)`
    SpNN(u64),
    /// `gl(N,ℍ)`
    GlQuaternion(u64),
    /// `so*(2N)`, stored by `N`
    SoStar(u64),
    /// `so(N,ℂ)`
    SoComplex(u64),
    /// `gl(N,ℂ)`
    GlComplex(u64),
    /// `su(N,N)`
    SuNN(u64),
    /// `sl(2N,ℝ)`, stored by `N`
    SlEvenReal(u64),
    /// `sl(2N,ℂ)`, stored by `N`
    SlEvenComplex(u64),
    /// `sl(2N,ℍ)`, stored by `N`
    SlEvenQuaternion(u64),
    /// `sl(1,𝔻)`
    SlOne(DivisionAlgebra),
    /// `su(p,q;𝔻)` with `p ≠ q`
    SuPQ {
        p: u64,
        q: u64,
        field: DivisionAlgebra,
    },
    /// `sl(2N+1,𝔻)`, stored by `N ≥ 1`
    SlOdd { n: u64, field: DivisionAlgebra },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableValue {
    pub rho1: u64,
    pub rho2: u64,
}

impl ClassicalPairKind {
    /// Checks the size parameters; every row needs positive sizes.
    pub fn validate(&self) -> Result<()> {
        use ClassicalPairKind::*;
        let bad = |msg: String| Err(Error::InvalidPair(msg));
        match *self {
            SoNN(n) | GlReal(n) | SpReal(n) | SpComplex(n) | SpNN(n) | GlQuaternion(n)
            | SoStar(n) | SoComplex(n) | GlComplex(n) | SuNN(n) | SlEvenReal(n)
            | SlEvenComplex(n) | SlEvenQuaternion(n) => {
                if n == 0 {
                    return bad(format!("{self}: size must be positive"));
                }
            }
            SlOne(_) => {}
            SuPQ { p, q, .. } => {
                if p == 0 || q == 0 {
                    return bad(format!("{self}: sizes must be positive"));
                }
                if p == q {
                    return bad(format!("{self}: requires p ≠ q"));
                }
            }
            SlOdd { n, .. } => {
                if n == 0 {
                    return bad("sl(2N+1,D) requires N ≥ 1; use sl(1,D)".into());
                }
            }
        }
        Ok(())
    }

    /// Parses a concrete name such as `so(8,8)`, `gl(4,C)`, `sl(3,R)`,
    /// `so*(8)` or `su(2,1;H)`, or a template such as `so(N,N)`,
    /// `sl(2N+1,R)` or `su(p,q;C)` whose symbols are bound, in order, to
    /// `sizes` (`N`, or `p` then `q`).
    pub fn parse(name: &str, sizes: &[u64]) -> Result<Self> {
        let name: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        let open = name
            .find('(')
            .ok_or_else(|| Error::InvalidPair(format!("{name}: expected name(args)")))?;
        if !name.ends_with(')') {
            return Err(Error::InvalidPair(format!("{name}: expected name(args)")));
        }
        let head = &name[..open];
        let body = &name[open + 1..name.len() - 1];
        let (args, field) = match body.split_once(';') {
            Some((a, f)) => (a, Some(f)),
            None => (body, None),
        };
        let raw: Vec<&str> = args.split(',').collect();
        let mut ints = Vec::new();
        let mut fields = Vec::new();
        let mut symbols = Vec::new();
        for arg in &raw {
            if let Some(f) = DivisionAlgebra::parse(arg) {
                fields.push(f);
            } else {
                ints.push(eval_size(arg, sizes, &mut symbols)?);
            }
        }
        if let Some(f) = field {
            fields.push(
                DivisionAlgebra::parse(f)
                    .ok_or_else(|| Error::InvalidPair(format!("{name}: unknown field {f:?}")))?,
            );
        }
        let kind = resolve(head, &ints, &fields).ok_or_else(|| {
            Error::InvalidPair(format!("{name}: not a catalogued classical pair"))
        })?;
        kind.validate()?;
        Ok(kind)
    }
}

// Evaluates `k`, `N`, `kN`, `kN+c`, `p`, `q` with symbols bound to sizes in
// order of first appearance.
fn eval_size(arg: &str, sizes: &[u64], symbols: &mut Vec<char>) -> Result<u64> {
    if let Ok(v) = arg.parse::<u64>() {
        return Ok(v);
    }
    let sym_pos = arg
        .find(|c: char| c.is_ascii_alphabetic())
        .ok_or_else(|| Error::InvalidPair(format!("bad size argument {arg:?}")))?;
    let sym = arg[sym_pos..].chars().next().expect("found");
    let coeff: u64 = if sym_pos == 0 {
        1
    } else {
        arg[..sym_pos]
            .parse()
            .map_err(|_| Error::InvalidPair(format!("bad size argument {arg:?}")))?
    };
    let rest = &arg[sym_pos + sym.len_utf8()..];
    let offset: u64 = match rest.strip_prefix('+') {
        Some(c) => c
            .parse()
            .map_err(|_| Error::InvalidPair(format!("bad size argument {arg:?}")))?,
        None if rest.is_empty() => 0,
        None => return Err(Error::InvalidPair(format!("bad size argument {arg:?}"))),
    };
    let slot = match symbols.iter().position(|&s| s == sym) {
        Some(i) => i,
        None => {
            symbols.push(sym);
            symbols.len() - 1
        }
    };
    let value = *sizes
        .get(slot)
        .ok_or_else(|| Error::InvalidPair(format!("no size supplied for {sym}")))?;
    Ok(coeff * value + offset)
}

fn resolve(head: &str, ints: &[u64], fields: &[DivisionAlgebra]) -> Option<ClassicalPairKind> {
    use ClassicalPairKind::*;
    use DivisionAlgebra::*;
    let kind = match (head, ints, fields) {
        ("so", [a, b], []) if a == b => SoNN(*a),
        ("so", [p, q], []) => SuPQ {
            p: *p,
            q: *q,
            field: Real,
        },
        ("so", [n], [Complex]) => SoComplex(*n),
        ("so*", [m], []) if m % 2 == 0 => SoStar(m / 2),
        ("gl", [n], [Real]) => GlReal(*n),
        ("gl", [n], [Complex]) => GlComplex(*n),
        ("gl", [n], [Quaternion]) => GlQuaternion(*n),
        ("sp", [n], [Real]) => SpReal(*n),
        ("sp", [n], [Complex]) => SpComplex(*n),
        ("sp", [a, b], []) if a == b => SpNN(*a),
        ("sp", [p, q], []) => SuPQ {
            p: *p,
            q: *q,
            field: Quaternion,
        },
        ("su", [a, b], []) if a == b => SuNN(*a),
        ("su", [p, q], []) => SuPQ {
            p: *p,
            q: *q,
            field: Complex,
        },
        ("su", [a, b], [f]) if a == b => match f {
            Real => SoNN(*a),
            Complex => SuNN(*a),
            Quaternion => SpNN(*a),
        },
        ("su", [p, q], [f]) => SuPQ {
            p: *p,
            q: *q,
            field: *f,
        },
        ("sl", [1], [f]) => SlOne(*f),
        ("sl", [m], [f]) if m % 2 == 0 => match f {
            Real => SlEvenReal(m / 2),
            Complex => SlEvenComplex(m / 2),
            Quaternion => SlEvenQuaternion(m / 2),
        },
        ("sl", [m], [f]) => SlOdd {
            n: (m - 1) / 2,
            field: *f,
        },
        _ => return None,
    };
    Some(kind)
}

impl fmt::Display for ClassicalPairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ClassicalPairKind::*;
        match *self {
            SoNN(n) => write!(f, "so({n},{n})"),
            GlReal(n) => write!(f, "gl({n},R)"),
            SpReal(n) => write!(f, "sp({n},R)"),
            SpComplex(n) => write!(f, "sp({n},C)"),
            SpNN(n) => write!(f, "sp({n},{n})"),
            GlQuaternion(n) => write!(f, "gl({n},H)"),
            SoStar(n) => write!(f, "so*({})", 2 * n),
            SoComplex(n) => write!(f, "so({n},C)"),
            GlComplex(n) => write!(f, "gl({n},C)"),
            SuNN(n) => write!(f, "su({n},{n})"),
            SlEvenReal(n) => write!(f, "sl({},R)", 2 * n),
            SlEvenComplex(n) => write!(f, "sl({},C)", 2 * n),
            SlEvenQuaternion(n) => write!(f, "sl({},H)", 2 * n),
            SlOne(d) => write!(f, "sl(1,{})", d.symbol()),
            SuPQ { p, q, field } => write!(f, "su({p},{q};{})", field.symbol()),
            SlOdd { n, field } => write!(f, "sl({},{})", 2 * n + 1, field.symbol()),
        }
    }
}

impl FromStr for ClassicalPairKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassicalPairKind::parse(s, &[])
    }
}

/// `(ρ⁽¹⁾, ρ⁽²⁾)` of a classical pair in its standard representation.
pub fn table_value(pair: &ClassicalPairKind) -> Result<TableValue> {
    use ClassicalPairKind::*;
    pair.validate()?;
    let same = |v: u64| TableValue { rho1: v, rho2: v };
    let ord = |n: u64| u64::from(ord2(n).expect("validated positive"));
    let value = match *pair {
        SoNN(n) => same(rho(n)?),
        GlReal(n) => same(rho_of_fraction(n, 2) + 1),
        SpReal(n) => same(rho_of_fraction(n, 2) + 2),
        SpComplex(n) => same(rho_of_fraction(n, 2) + 3),
        SpNN(n) => same(rho_of_fraction(n, 2) + 4),
        GlQuaternion(n) => same(rho_of_fraction(n, 4) + 5),
        SoStar(n) => same(rho_of_fraction(n, 8) + 6),
        SoComplex(n) => same(rho_of_fraction(n, 16) + 7),
        GlComplex(n) => same(2 * ord(n) + 1),
        SuNN(n) => same(2 * ord(n) + 2),
        SlEvenReal(n) => same(rho(n)? + 1),
        SlEvenComplex(n) => same(2 * ord(n) + 3),
        SlEvenQuaternion(n) => same(rho_of_fraction(n, 2) + 5),
        SlOne(_) | SuPQ { .. } => same(0),
        SlOdd { .. } => TableValue { rho1: 0, rho2: 1 },
    };
    Ok(value)
}

/// Every catalogued row at the given size (where the row takes one size),
/// plus `su(p,q;𝔻)` rows for `p ≠ q ≤ size`.
pub fn catalog_at(size: u64) -> Vec<ClassicalPairKind> {
    use ClassicalPairKind::*;
    use DivisionAlgebra::*;
    let mut out = vec![
        SoNN(size),
        GlReal(size),
        SpReal(size),
        SpComplex(size),
        SpNN(size),
        GlQuaternion(size),
        SoStar(size),
        SoComplex(size),
        GlComplex(size),
        SuNN(size),
        SlEvenReal(size),
        SlEvenComplex(size),
        SlEvenQuaternion(size),
    ];
    for field in [Real, Complex, Quaternion] {
        out.push(SlOdd { n: size, field });
        if size == 1 {
            out.push(SlOne(field));
        }
        for p in 1..=size {
            if p != size {
                out.push(SuPQ { p, q: size, field });
            }
        }
    }
    out
}
