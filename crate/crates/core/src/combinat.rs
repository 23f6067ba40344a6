//! Stirling numbers, Bell polynomials, and integer sequences read off
//! `A(λ)e^{zB(λ)}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::flow::{self, FlowError, QvSymbol};
use crate::fps::{elementary, FpsError, Series};
use crate::poly::Poly;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CombinatError {
    #[error("term {index} of {name} is {value}, not an integer")]
    NonIntegerTerm { name: String, index: usize, value: Rational },
    #[error("unknown sequence `{0}`")]
    UnknownSequence(String),
    #[error("series order {have} is too low for {need} terms")]
    OrderTooLow { have: usize, need: usize },
    #[error(transparent)]
    Fps(#[from] FpsError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// Row `n` of the Stirling triangle of the second kind, `S(n, 0..=n)`.
pub fn stirling2_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for m in 0..n {
        let mut next = vec![BigInt::zero(); m + 2];
        for k in 1..=m + 1 {
            let keep = if k <= m { &row[k] * BigInt::from(k) } else { BigInt::zero() };
            next[k] = keep + &row[k - 1];
        }
        row = next;
    }
    row
}

/// `S(n, k)`; zero for `k > n`.
pub fn stirling2(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    stirling2_row(n).swap_remove(k)
}

/// `B(n, x) = Σ_k S(n, k) x^k`.
pub fn bell_poly(n: usize) -> Poly {
    Poly::new(stirling2_row(n).into_iter().map(Rational::from_integer).collect())
}

/// `B(n, 1)`.
pub fn bell_number(n: usize) -> BigInt {
    stirling2_row(n).into_iter().sum()
}

/// `a_n = n!·[λ^n] A(λ)e^{zB(λ)}` for `n = 0..=n_max`.
pub fn egf_terms(a: &Series, b: &Series, z: &Rational, n_max: usize) -> Result<Vec<Rational>, CombinatError> {
    let have = a.order().min(b.order());
    if have < n_max {
        return Err(CombinatError::OrderTooLow { have, need: n_max });
    }
    let gen = a.mul(&b.scale(z).exp()?);
    Ok((0..=n_max).map(|n| gen.coeff(n) * Rational::from_integer(rational::factorial(n))).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub name: String,
    pub provenance: String,
    /// Whether every term is required to be an integer.
    pub integer: bool,
    #[serde(with = "rational::serde_pq_vec")]
    pub terms: Vec<Rational>,
}

impl SequenceRecord {
    /// Builds a record, rejecting a non-integer term when `integer` is set.
    pub fn new(name: &str, provenance: &str, integer: bool, terms: Vec<Rational>) -> Result<Self, CombinatError> {
        if integer {
            if let Some((index, value)) = terms.iter().enumerate().find(|(_, t)| !t.is_integer()) {
                return Err(CombinatError::NonIntegerTerm { name: name.to_string(), index, value: value.clone() });
            }
        }
        Ok(SequenceRecord { name: name.to_string(), provenance: provenance.to_string(), integer, terms })
    }

    /// Terms as integers, if they all are.
    pub fn integers(&self) -> Option<Vec<BigInt>> {
        self.terms.iter().map(|t| t.is_integer().then(|| t.to_integer())).collect()
    }
}

impl fmt::Display for SequenceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Sequence record from an arbitrary pair; integrality is not required.
pub fn sequence_from_egf(a: &Series, b: &Series, z: &Rational, n_max: usize) -> Result<SequenceRecord, CombinatError> {
    let terms = egf_terms(a, b, z, n_max)?;
    let provenance = format!("n!·[λ^n] A(λ)·exp({}·B(λ))", z);
    SequenceRecord::new("custom", &provenance, false, terms)
}

/// Sequences produced by a boson operator at `z = z' = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedSequence {
    /// `q = x^r`, `v = 0`.
    RForests(u32),
    /// `q = x(1 + ln x)`, `v = 0`.
    PartitionsOfPartitions,
    /// `q = 1`, `v = 1/(2 - x)`.
    Arrangements,
    /// `q = 1/(2 - x)`, `v = 0`.
    BesselPaths,
}

impl NamedSequence {
    pub const NAMES: [&'static str; 4] = ["r_forests", "partitions_of_partitions", "arrangements", "bessel_paths"];

    /// Looks up a name; `r` is used by `r_forests` only and defaults to 2.
    pub fn lookup(name: &str, r: Option<u32>) -> Result<Self, CombinatError> {
        match name {
            "r_forests" => match r.unwrap_or(2) {
                0 => Err(CombinatError::UnknownSequence("r_forests(0)".into())),
                r => Ok(NamedSequence::RForests(r)),
            },
            "partitions_of_partitions" => Ok(NamedSequence::PartitionsOfPartitions),
            "arrangements" => Ok(NamedSequence::Arrangements),
            "bessel_paths" => Ok(NamedSequence::BesselPaths),
            other => Err(CombinatError::UnknownSequence(other.to_string())),
        }
    }

    pub fn name(self) -> String {
        match self {
            NamedSequence::RForests(r) => format!("r_forests({r})"),
            NamedSequence::PartitionsOfPartitions => "partitions_of_partitions".into(),
            NamedSequence::Arrangements => "arrangements".into(),
            NamedSequence::BesselPaths => "bessel_paths".into(),
        }
    }

    fn provenance(self) -> String {
        match self {
            NamedSequence::RForests(1) => "q = x, v = 0; B = e^λ - 1".into(),
            NamedSequence::RForests(2) => "q = x^2, v = 0; B = 1/(1 - λ) - 1".into(),
            NamedSequence::RForests(r) => {
                format!("q = x^{r}, v = 0; B = (1 - {}λ)^(-1/{}) - 1", r - 1, r - 1)
            }
            NamedSequence::PartitionsOfPartitions => "q = x(1 + ln x), v = 0; B = e^(e^λ - 1) - 1".into(),
            NamedSequence::Arrangements => "q = 1, v = 1/(2 - x); A = 1/(1 - λ), B = λ; a_n = n!·Σ_{k<=n} 1/k!".into(),
            NamedSequence::BesselPaths => "q = 1/(2 - x), v = 0; B = 1 - (1 - 2λ)^(1/2)".into(),
        }
    }

    /// `(A, B)` in closed form, to the given order.
    pub fn pair(self, order: usize) -> Result<(Series, Series), CombinatError> {
        let one = Series::one(order);
        Ok(match self {
            NamedSequence::RForests(1) => (one.clone(), elementary::exp_x(order).sub(&one)),
            NamedSequence::RForests(r) => {
                let s = i64::from(r) - 1;
                let base = Series::from_ints(&[1, -s], order);
                (one.clone(), base.pow_rational(&rational::ratio(-1, s))?.sub(&one))
            }
            NamedSequence::PartitionsOfPartitions => {
                let inner = elementary::exp_x(order).sub(&one);
                (one.clone(), inner.exp()?.sub(&one))
            }
            NamedSequence::Arrangements => (elementary::geometric(order), Series::x(order)),
            NamedSequence::BesselPaths => {
                let root = Series::from_ints(&[1, -2], order).pow_rational(&rational::ratio(1, 2))?;
                (one.clone(), one.sub(&root))
            }
        })
    }

    /// The generating operator's `q`, `v`, expanded about `x = 1`.
    pub fn operator(self, order: usize) -> Result<QvSymbol, CombinatError> {
        let center = Rational::one();
        // y = x - 1
        let x = Series::from_ints(&[1, 1], order);
        let (q, v) = match self {
            NamedSequence::RForests(r) => (x.pow(r as usize), Series::zero(order)),
            NamedSequence::PartitionsOfPartitions => {
                let ln_ex = Series::one(order).add(&elementary::log1p(order));
                (x.mul(&ln_ex), Series::zero(order))
            }
            NamedSequence::Arrangements => (Series::one(order), Series::from_ints(&[1, -1], order).recip()?),
            NamedSequence::BesselPaths => (Series::from_ints(&[1, -1], order).recip()?, Series::zero(order)),
        };
        Ok(QvSymbol::new(q, v, center))
    }
}

impl FromStr for NamedSequence {
    type Err = CombinatError;

    /// Accepts `r_forests(R)` as well as the bare names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(arg) = s.strip_prefix("r_forests(").and_then(|t| t.strip_suffix(')')) {
            let r = arg.parse().map_err(|_| CombinatError::UnknownSequence(s.to_string()))?;
            return NamedSequence::lookup("r_forests", Some(r));
        }
        NamedSequence::lookup(s, None)
    }
}

/// Terms `0..=n_max` of a named sequence from its closed-form EGF.
pub fn named_sequence(seq: NamedSequence, n_max: usize) -> Result<SequenceRecord, CombinatError> {
    let (a, b) = seq.pair(n_max)?;
    let terms = egf_terms(&a, &b, &Rational::one(), n_max)?;
    SequenceRecord::new(&seq.name(), &seq.provenance(), true, terms)
}

/// The same terms obtained from the operator: solve the flow at `z' = 1`
/// for `A`, `B`, then extract at `z = 1`.
pub fn named_sequence_via_flow(seq: NamedSequence, n_max: usize) -> Result<SequenceRecord, CombinatError> {
    let sym = seq.operator(n_max)?;
    let (a, b) = flow::sheffer_from_qv(&sym, &Rational::one(), n_max)?;
    let terms = egf_terms(&a, &b, &Rational::one(), n_max)?;
    SequenceRecord::new(&seq.name(), &seq.provenance(), true, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ints(rec: &SequenceRecord) -> Vec<i64> {
        rec.integers().unwrap().iter().map(|b| i64::try_from(b).unwrap()).collect()
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(4, 2), BigInt::from(7));
        assert_eq!(stirling2(0, 0), BigInt::one());
        assert_eq!(stirling2(5, 0), BigInt::zero());
        assert_eq!(stirling2(3, 5), BigInt::zero());
        for n in 0..12 {
            assert_eq!(stirling2(n, n), BigInt::one());
        }
    }

    #[test]
    fn stirling_counts_set_partitions() {
        // Restricted growth strings of length n with max k - 1.
        fn count(n: usize, k: usize) -> u64 {
            fn go(pos: usize, n: usize, used: usize, k: usize) -> u64 {
                if pos == n {
                    return u64::from(used == k);
                }
                (0..=used.min(k - 1)).map(|b| go(pos + 1, n, used.max(b + 1), k)).sum()
            }
            if k == 0 {
                return u64::from(n == 0);
            }
            go(0, n, 0, k)
        }
        for n in 0..=8 {
            for k in 0..=n {
                assert_eq!(stirling2(n, k), BigInt::from(count(n, k)), "S({n},{k})");
            }
        }
    }

    #[test]
    fn bell_values() {
        assert_eq!(bell_poly(0), Poly::one());
        assert_eq!(bell_poly(3), Poly::from_ints(&[0, 1, 3, 1]));
        let bells: Vec<BigInt> = (0..8).map(bell_number).collect();
        assert_eq!(bells, [1, 1, 2, 5, 15, 52, 203, 877].map(BigInt::from));
    }

    #[test]
    fn bell_polys_are_the_egf() {
        let order = 10;
        let (a, b) = (Series::one(order), elementary::exp_x(order).sub(&Series::one(order)));
        let s = crate::sheffer::sequence_from_ab(&a, &b, order).unwrap();
        for (n, p) in s.iter().enumerate() {
            assert_eq!(*p, bell_poly(n));
        }
    }

    #[test]
    fn forests() {
        let r2 = named_sequence(NamedSequence::RForests(2), 6).unwrap();
        assert_eq!(ints(&r2), [1, 1, 3, 13, 73, 501, 4051]);
        let r3 = named_sequence(NamedSequence::RForests(3), 6).unwrap();
        assert_eq!(ints(&r3), [1, 1, 4, 25, 211, 2236, 28471]);
        let r1 = named_sequence(NamedSequence::RForests(1), 6).unwrap();
        assert_eq!(ints(&r1), [1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn partitions_of_partitions() {
        let rec = named_sequence(NamedSequence::PartitionsOfPartitions, 6).unwrap();
        assert_eq!(ints(&rec), [1, 1, 3, 12, 60, 358, 2471]);
    }

    #[test]
    fn arrangements_match_direct_formula() {
        let rec = named_sequence(NamedSequence::Arrangements, 10).unwrap();
        let direct: Vec<Rational> = (0..=10)
            .map(|n| {
                (0..=n)
                    .map(|k| Rational::new(rational::factorial(n), rational::factorial(k)))
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect();
        assert_eq!(rec.terms, direct);
        assert_eq!(ints(&rec)[..7], [1, 2, 5, 16, 65, 326, 1957]);
    }

    #[test]
    fn bessel_paths_terms() {
        let rec = named_sequence(NamedSequence::BesselPaths, 6).unwrap();
        assert_eq!(ints(&rec), [1, 1, 2, 7, 37, 266, 2431]);
    }

    #[test]
    fn flow_route_agrees() {
        for seq in [
            NamedSequence::RForests(1),
            NamedSequence::RForests(2),
            NamedSequence::RForests(3),
            NamedSequence::RForests(4),
            NamedSequence::PartitionsOfPartitions,
            NamedSequence::Arrangements,
            NamedSequence::BesselPaths,
        ] {
            let a = named_sequence(seq, 12).unwrap();
            let b = named_sequence_via_flow(seq, 12).unwrap();
            assert_eq!(a.terms, b.terms, "{}", seq.name());
        }
    }

    #[test]
    fn non_integer_rejected() {
        let err = SequenceRecord::new("half", "test", true, vec![int(1), rational::ratio(1, 2)]).unwrap_err();
        assert!(matches!(err, CombinatError::NonIntegerTerm { index: 1, .. }));
        let rec = sequence_from_egf(&Series::one(4), &Series::x(4), &rational::ratio(1, 2), 3).unwrap();
        assert_eq!(rec.terms[3], rational::ratio(1, 8));
    }

    #[test]
    fn names() {
        assert_eq!("r_forests(3)".parse::<NamedSequence>().unwrap(), NamedSequence::RForests(3));
        assert_eq!("bessel_paths".parse::<NamedSequence>().unwrap(), NamedSequence::BesselPaths);
        assert!(matches!("nope".parse::<NamedSequence>(), Err(CombinatError::UnknownSequence(_))));
        assert_eq!(named_sequence(NamedSequence::PartitionsOfPartitions, 0).unwrap().terms, [int(1)]);
    }

    #[test]
    fn record_json_round_trip() {
        let rec = named_sequence(NamedSequence::RForests(2), 4).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains(r#""terms":["1/1","1/1","3/1","13/1","73/1"]"#));
        let back: SequenceRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }
}
