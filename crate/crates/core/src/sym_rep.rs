//! Symmetric group bookkeeping: partitions, characters, decompositions and
//! the Young-subgroup functionals used to recover full characters from
//! invariant counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::exact_linalg::{
    rational, Echelon, LinalgError, Rational, RationalSparseMatrix, SparseVector,
};

#[derive(Debug, thiserror::Error)]
pub enum SymRepError {
    #[error("size mismatch: |{lambda}| != |{mu}|")]
    SizeMismatch { lambda: Partition, mu: Partition },
    #[error("projector for {0} is not idempotent; the supplied matrices are not a representation")]
    RepresentationViolation(Partition),
    #[error("young functionals {0:?} do not determine the requested multiplicities")]
    Underdetermined(Vec<YoungFunctional>),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn row(n: usize) -> Self {
        Self::new(vec![n])
    }

    pub fn column(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Self {
        let first = self.0.first().copied().unwrap_or(0);
        Self(
            (1..=first)
                .map(|k| self.0.iter().filter(|&&p| p >= k).count())
                .collect(),
        )
    }

    /// Multiplicities m_i of each part size i.
    fn multiplicities(&self) -> BTreeMap<usize, usize> {
        self.0.iter().copied().counts().into_iter().collect()
    }

    /// Centralizer order z = Π i^{m_i} m_i!.
    pub fn z(&self) -> u128 {
        self.multiplicities()
            .into_iter()
            .map(|(i, m)| (i as u128).pow(m as u32) * factorial(m))
            .product()
    }

    /// Order of the Young subgroup S_{μ_1} × S_{μ_2} × ...
    pub fn young_order(&self) -> u128 {
        self.0.iter().map(|&p| factorial(p)).product()
    }

    /// Sign of any permutation of this cycle type.
    pub fn sign(&self) -> i64 {
        if (self.size() - self.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All partitions of n in reverse-lexicographic order.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            go(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn class_size(mu: &Partition) -> u128 {
    factorial(mu.size()) / mu.z()
}

static MN_CACHE: Lazy<RwLock<HashMap<(Partition, Partition), i64>>> = Lazy::new(Default::default);

/// Irreducible character value χ_λ(μ) by rim-hook recursion on beta sets.
pub fn mn_character(lambda: &Partition, mu: &Partition) -> Result<i64, SymRepError> {
    if lambda.size() != mu.size() {
        return Err(SymRepError::SizeMismatch {
            lambda: lambda.clone(),
            mu: mu.clone(),
        });
    }
    Ok(mn_cached(lambda, mu))
}

fn mn_cached(lambda: &Partition, mu: &Partition) -> i64 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.clone(), mu.clone());
    if let Some(v) = MN_CACHE.read().get(&key) {
        return *v;
    }
    // remove the largest part of mu as a rim hook of lambda
    let r = mu.0[0];
    let rest = Partition(mu.0[1..].to_vec());
    let len = lambda.len();
    let beta: Vec<usize> = lambda
        .0
        .iter()
        .enumerate()
        .map(|(i, &p)| p + len - 1 - i)
        .collect();
    let mut total = 0i64;
    for (i, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let crossed = beta.iter().filter(|&&x| x > b - r && x < b).count();
        let mut nb = beta.clone();
        nb[i] = b - r;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let k = nb.len();
        let parts: Vec<usize> = nb
            .iter()
            .enumerate()
            .map(|(j, &x)| x - (k - 1 - j))
            .collect();
        let sign = if crossed % 2 == 0 { 1 } else { -1 };
        total += sign * mn_cached(&Partition::new(parts), &rest);
    }
    MN_CACHE.write().insert(key, total);
    total
}

pub fn dimension(lambda: &Partition) -> i64 {
    mn_cached(lambda, &Partition::column(lambda.size()))
}

/// Class function on S_n, indexed by cycle type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub n: usize,
    pub values: BTreeMap<Partition, Rational>,
}

impl Character {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            values: partitions(n)
                .into_iter()
                .map(|p| (p, Rational::zero()))
                .collect(),
        }
    }

    pub fn irreducible(lambda: &Partition) -> Self {
        let n = lambda.size();
        Self {
            n,
            values: partitions(n)
                .into_iter()
                .map(|mu| {
                    let v = mn_cached(lambda, &mu);
                    (mu, rational(v))
                })
                .collect(),
        }
    }

    /// Character of a representation with the given multiplicities.
    pub fn from_multiplicities(n: usize, mults: &BTreeMap<Partition, Rational>) -> Self {
        let mut out = Self::zero(n);
        for (lambda, m) in mults {
            for (mu, v) in out.values.iter_mut() {
                *v += m * rational(mn_cached(lambda, mu));
            }
        }
        out
    }

    pub fn value(&self, mu: &Partition) -> Rational {
        self.values.get(mu).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Rational {
        self.value(&Partition::column(self.n))
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &Character) {
        for (mu, v) in self.values.iter_mut() {
            *v += c * other.value(mu);
        }
    }

    pub fn inner(&self, other: &Character) -> Rational {
        let nf = Rational::from_integer(BigInt::from(factorial(self.n)));
        let sum: Rational = self
            .values
            .iter()
            .map(|(mu, v)| {
                Rational::from_integer(BigInt::from(class_size(mu))) * v * other.value(mu)
            })
            .sum();
        sum / nf
    }
}

/// Irreducible multiplicities with integrality diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub multiplicities: BTreeMap<Partition, Rational>,
    pub non_integer: Vec<Partition>,
    pub negative: Vec<Partition>,
}

impl Decomposition {
    pub fn from_multiplicities(multiplicities: BTreeMap<Partition, Rational>) -> Self {
        let non_integer = multiplicities
            .iter()
            .filter(|(_, m)| !m.is_integer())
            .map(|(p, _)| p.clone())
            .collect();
        let negative = multiplicities
            .iter()
            .filter(|(_, m)| m.is_negative())
            .map(|(p, _)| p.clone())
            .collect();
        Self {
            multiplicities,
            non_integer,
            negative,
        }
    }

    pub fn is_genuine(&self) -> bool {
        self.non_integer.is_empty() && self.negative.is_empty()
    }

    /// Nonzero integer multiplicities; fails on fractional values.
    pub fn integer_multiplicities(&self) -> Option<BTreeMap<Partition, i64>> {
        self.multiplicities
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(p, m)| {
                m.is_integer()
                    .then(|| (p.clone(), m.to_integer().to_i64().expect("small")))
            })
            .collect()
    }
}

pub fn decompose(chi: &Character) -> Decomposition {
    let mults = partitions(chi.n)
        .into_iter()
        .map(|lambda| {
            let m = chi.inner(&Character::irreducible(&lambda));
            (lambda, m)
        })
        .collect();
    Decomposition::from_multiplicities(mults)
}

// ---------------------------------------------------------------------------
// Permutations and dense projectors

/// Permutation of 0..n in one-line notation: `p[i]` is the image of i.
pub type Permutation = Vec<usize>;

pub fn cycle_type(p: &[usize]) -> Partition {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let (mut len, mut x) = (0, s);
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        parts.push(len);
    }
    Partition::new(parts)
}

pub fn permutation_sign(p: &[usize]) -> i64 {
    cycle_type(p).sign()
}

pub fn inverse_permutation(p: &[usize]) -> Permutation {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

pub fn all_permutations(n: usize) -> Vec<Permutation> {
    (0..n).permutations(n).collect()
}

/// Central idempotent e_λ = (χ_λ(1)/n!) Σ_σ χ_λ(σ^{-1}) M_σ, built by a dense
/// sum over S_n. Only sensible for small n.
pub fn isotypic_projector<F>(
    lambda: &Partition,
    mut action: F,
) -> Result<RationalSparseMatrix, SymRepError>
where
    F: FnMut(&Permutation) -> RationalSparseMatrix,
{
    let n = lambda.size();
    let mut acc: Option<RationalSparseMatrix> = None;
    for sigma in all_permutations(n) {
        // χ(σ^{-1}) = χ(σ) for symmetric groups
        let c = mn_cached(lambda, &cycle_type(&sigma));
        if c == 0 {
            continue;
        }
        let term = action(&sigma).scale(&rational(c));
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    let id = action(&(0..n).collect());
    let acc = acc.unwrap_or_else(|| RationalSparseMatrix::zeros(id.rows(), id.cols()));
    let scale = Rational::new(BigInt::from(dimension(lambda)), BigInt::from(factorial(n)));
    let e = acc.scale(&scale);
    if e.mul(&e)? != e {
        return Err(SymRepError::RepresentationViolation(lambda.clone()));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Young-subgroup functionals

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Twist {
    Trivial,
    Sign,
}

/// The functional V ↦ dim Hom_{S_μ}(χ, V) where χ is the trivial or sign
/// character of the Young subgroup S_μ. Its value on V_λ is the Kostka
/// number K_{λμ} (trivial) or K_{λ'μ} (sign).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YoungFunctional {
    pub shape: Partition,
    pub twist: Twist,
}

impl YoungFunctional {
    pub fn trivial(n: usize) -> Self {
        Self {
            shape: Partition::row(n),
            twist: Twist::Trivial,
        }
    }

    pub fn sign(n: usize) -> Self {
        Self {
            shape: Partition::row(n),
            twist: Twist::Sign,
        }
    }

    /// Value on each irreducible V_λ, in `partitions(n)` order.
    pub fn coefficients(&self) -> Vec<i64> {
        let n = self.shape.size();
        let induced = induced_character(&self.shape, self.twist);
        partitions(n)
            .iter()
            .map(|lambda| {
                let m = induced.inner(&Character::irreducible(lambda));
                m.to_integer().to_i64().expect("kostka number fits")
            })
            .collect()
    }

    /// The sign functional on the one-row shape reads off V_{1^n}, the
    /// trivial one V_{(n)}.
    pub fn target(&self) -> Option<Partition> {
        let n = self.shape.size();
        (self.shape == Partition::row(n)).then(|| match self.twist {
            Twist::Trivial => Partition::row(n),
            Twist::Sign => Partition::column(n),
        })
    }
}

impl fmt::Display for YoungFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.twist {
            Twist::Trivial => "triv",
            Twist::Sign => "sgn",
        };
        write!(f, "{t}{}", self.shape)
    }
}

/// Induced character Ind_{S_μ}^{S_n}(twist). At a permutation of cycle type
/// ν it counts assignments of the cycles of ν to the blocks of μ that fill
/// every block exactly, times the sign of ν for the sign twist.
pub fn induced_character(mu: &Partition, twist: Twist) -> Character {
    let n = mu.size();
    let mut out = Character::zero(n);
    for nu in partitions(n) {
        let mut remaining = mu.0.clone();
        let count = count_fillings(&nu.0, &mut remaining);
        let sign = match twist {
            Twist::Trivial => 1,
            Twist::Sign => nu.sign(),
        };
        out.values
            .insert(nu, Rational::from_integer(BigInt::from(count) * sign));
    }
    out
}

fn count_fillings(cycles: &[usize], remaining: &mut [usize]) -> u128 {
    let Some((&c, rest)) = cycles.split_first() else {
        return u128::from(remaining.iter().all(|&r| r == 0));
    };
    let mut total = 0;
    for j in 0..remaining.len() {
        if remaining[j] >= c {
            remaining[j] -= c;
            total += count_fillings(rest, remaining);
            remaining[j] += c;
        }
    }
    total
}

/// Picks Young functionals, cheapest (largest subgroup) first, until every
/// target multiplicity is determined by their values.
pub fn choose_functionals(n: usize, targets: &[Partition]) -> Vec<YoungFunctional> {
    let parts = partitions(n);
    let index: HashMap<&Partition, usize> = parts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut candidates: Vec<YoungFunctional> = parts
        .iter()
        .flat_map(|shape| {
            [Twist::Trivial, Twist::Sign].map(|twist| YoungFunctional {
                shape: shape.clone(),
                twist,
            })
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.shape
            .young_order()
            .cmp(&a.shape.young_order())
            .then_with(|| a.cmp(b))
    });
    let row =
        |f: &YoungFunctional| SparseVector::from_ints(f.coefficients().into_iter().enumerate());
    let determines = |fs: &[YoungFunctional]| {
        let mut span = Echelon::new(parts.len());
        for f in fs {
            span.insert(&row(f));
        }
        targets
            .iter()
            .all(|t| span.contains(&SparseVector::unit(index[t])))
    };
    let mut span = Echelon::new(parts.len());
    let mut chosen = Vec::new();
    for cand in candidates {
        if determines(&chosen) {
            break;
        }
        if span.insert(&row(&cand)) {
            chosen.push(cand);
        }
    }
    // drop functionals the targets turn out not to need, most expensive first
    for k in (0..chosen.len()).rev() {
        let mut without = chosen.clone();
        without.remove(k);
        if determines(&without) {
            chosen = without;
        }
    }
    chosen
}

/// Solves for the multiplicities of `targets` given the values of the
/// chosen functionals on a representation.
pub fn solve_multiplicities(
    functionals: &[YoungFunctional],
    values: &[i64],
    targets: &[Partition],
) -> Result<BTreeMap<Partition, Rational>, SymRepError> {
    let n = functionals.first().map_or(0, |f| f.shape.size());
    let parts = partitions(n);
    let mut ech = Echelon::new(parts.len());
    for f in functionals {
        ech.insert(&SparseVector::from_ints(
            f.coefficients().into_iter().enumerate(),
        ));
    }
    let mut out = BTreeMap::new();
    for t in targets {
        let k = parts
            .iter()
            .position(|p| p == t)
            .expect("target is a partition of n");
        // e_t = Σ c_j row_j, so mult_t = Σ c_j value_j
        let coords = ech
            .coordinates(&SparseVector::unit(k))
            .ok_or_else(|| SymRepError::Underdetermined(functionals.to_vec()))?;
        let m: Rational = coords
            .entries()
            .iter()
            .map(|(j, c)| c * rational(values[*j]))
            .sum();
        out.insert(t.clone(), m);
    }
    Ok(out)
}

/// The value of a functional on a representation given by multiplicities.
pub fn evaluate_functional(f: &YoungFunctional, mults: &BTreeMap<Partition, Rational>) -> Rational {
    let coeffs = f.coefficients();
    partitions(f.shape.size())
        .iter()
        .zip(coeffs)
        .map(|(lambda, k)| mults.get(lambda).cloned().unwrap_or_else(Rational::zero) * rational(k))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn partition_listing() {
        assert_eq!(partitions(3), vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]);
        assert_eq!(partitions(0), vec![Partition::new(vec![])]);
        // oracle: p(n) via the pentagonal-free recurrence on largest part
        fn count(n: usize, k: usize) -> usize {
            if n == 0 {
                return 1;
            }
            (1..=k.min(n)).map(|j| count(n - j, j)).sum()
        }
        for n in 0..12 {
            assert_eq!(partitions(n).len(), count(n, n));
        }
        assert_eq!(partitions(9).len(), 30);
    }

    #[test]
    fn class_sizes() {
        assert_eq!(class_size(&Partition::column(5)), 1);
        assert_eq!(class_size(&Partition::row(5)), 24);
        assert_eq!(class_size(&p(&[2, 1])), 3);
        for n in 0..9 {
            let total: u128 = partitions(n).iter().map(class_size).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn standard_character_of_s3() {
        let l = p(&[2, 1]);
        let vals: Vec<i64> = [p(&[1, 1, 1]), p(&[2, 1]), p(&[3])]
            .iter()
            .map(|mu| mn_character(&l, mu).unwrap())
            .collect();
        assert_eq!(vals, vec![2, 0, -1]);
        assert!(mn_character(&l, &p(&[2])).is_err());
    }

    #[test]
    fn trivial_and_sign_characters() {
        for n in 1..8 {
            for mu in partitions(n) {
                assert_eq!(mn_character(&Partition::row(n), &mu).unwrap(), 1);
                let expected = if (n - mu.len()) % 2 == 0 { 1 } else { -1 };
                assert_eq!(mn_character(&Partition::column(n), &mu).unwrap(), expected);
            }
        }
    }

    #[test]
    fn orthogonality_and_degrees() {
        for n in 0..=9 {
            let parts = partitions(n);
            let chars: Vec<Character> = parts.iter().map(Character::irreducible).collect();
            let sum_sq: i128 = parts.iter().map(|l| (dimension(l) as i128).pow(2)).sum();
            assert_eq!(sum_sq as u128, factorial(n));
            if n <= 7 {
                for (i, a) in chars.iter().enumerate() {
                    for (j, b) in chars.iter().enumerate() {
                        assert_eq!(a.inner(b), rational(i64::from(i == j)), "n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn regular_and_permutation_characters() {
        let mut reg = Character::zero(3);
        reg.values.insert(Partition::column(3), rational(6));
        let d = decompose(&reg);
        let m: Vec<Rational> = partitions(3)
            .iter()
            .map(|l| d.multiplicities[l].clone())
            .collect();
        assert_eq!(m, vec![rational(1), rational(2), rational(1)]);
        assert!(decompose(&Character::zero(4))
            .multiplicities
            .values()
            .all(Zero::is_zero));

        // permutation action on Q^n: fixed-point counts
        for n in 2..7 {
            let mut chi = Character::zero(n);
            for mu in partitions(n) {
                let fixed = mu.parts().iter().filter(|&&x| x == 1).count() as i64;
                chi.values.insert(mu, rational(fixed));
            }
            let d = decompose(&chi);
            assert!(d.is_genuine());
            let nz = d.integer_multiplicities().unwrap();
            assert_eq!(nz.len(), 2);
            assert_eq!(nz[&Partition::row(n)], 1);
            assert_eq!(nz[&p(&[n - 1, 1])], 1);
        }
    }

    #[test]
    fn decomposition_flags_fractions() {
        let mut chi = Character::zero(2);
        chi.values.insert(Partition::column(2), rational(1));
        let d = decompose(&chi);
        assert!(!d.is_genuine());
        assert_eq!(d.non_integer.len(), 2);
    }

    #[test]
    fn kostka_rows() {
        // trivial on S_(2,1): V_3 + V_21
        let f = YoungFunctional {
            shape: p(&[2, 1]),
            twist: Twist::Trivial,
        };
        assert_eq!(f.coefficients(), vec![1, 1, 0]);
        let f = YoungFunctional {
            shape: p(&[2, 1]),
            twist: Twist::Sign,
        };
        assert_eq!(f.coefficients(), vec![0, 1, 1]);
        assert_eq!(
            YoungFunctional::trivial(4).coefficients(),
            vec![1, 0, 0, 0, 0]
        );
        assert_eq!(YoungFunctional::sign(4).coefficients(), vec![0, 0, 0, 0, 1]);
    }

    #[test]
    fn functionals_determine_everything() {
        for n in 0..=8 {
            let parts = partitions(n);
            let fs = choose_functionals(n, &parts);
            // a made-up representation is recovered from its functional values
            let mults: BTreeMap<Partition, Rational> = parts
                .iter()
                .enumerate()
                .map(|(i, l)| (l.clone(), rational((i as i64 * 7 + 3) % 5)))
                .collect();
            let values: Vec<i64> = fs
                .iter()
                .map(|f| {
                    evaluate_functional(f, &mults)
                        .to_integer()
                        .to_i64()
                        .unwrap()
                })
                .collect();
            let solved = solve_multiplicities(&fs, &values, &parts).unwrap();
            assert_eq!(solved, mults, "n={n}");
        }
        assert_eq!(
            choose_functionals(6, &[Partition::row(6)]),
            vec![YoungFunctional::trivial(6)]
        );
        assert_eq!(
            choose_functionals(6, &[Partition::column(6)]),
            vec![YoungFunctional::sign(6)]
        );
    }

    #[test]
    fn projectors_on_permutation_module() {
        // S_3 permuting coordinates of Q^3
        let action = |s: &Permutation| {
            RationalSparseMatrix::from_int_triplets(
                3,
                3,
                s.iter().enumerate().map(|(i, &j)| (j, i, 1)),
            )
        };
        let e_triv = isotypic_projector(&Partition::row(3), action).unwrap();
        let e_std = isotypic_projector(&p(&[2, 1]), action).unwrap();
        let e_sgn = isotypic_projector(&Partition::column(3), action).unwrap();
        assert_eq!(crate::exact_linalg::rank(&e_triv), 1);
        assert_eq!(crate::exact_linalg::rank(&e_std), 2);
        assert!(e_sgn.is_zero());
        assert!(e_triv.mul(&e_std).unwrap().is_zero());
        let sum = e_triv.add(&e_std).unwrap().add(&e_sgn).unwrap();
        assert_eq!(sum, RationalSparseMatrix::identity(3));
    }
}
