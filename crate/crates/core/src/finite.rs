//! Drazin inverses beyond matrices: endofunctions of a finite set, and
//! elements of any finite monoid via their power cycle.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::linalg::Matrix;

/// A function `{0..n} -> {0..n}` given by its table. Composition is
/// `(f . g)(x) = f(g(x))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawEndoFun", into = "RawEndoFun")]
pub struct EndoFun {
    table: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawEndoFun {
    n: usize,
    table: Vec<usize>,
}

impl TryFrom<RawEndoFun> for EndoFun {
    type Error = Error;

    fn try_from(raw: RawEndoFun) -> Result<Self> {
        if raw.table.len() != raw.n {
            return Err(Error::Parse(format!(
                "table has {} entries, expected {}",
                raw.table.len(),
                raw.n
            )));
        }
        EndoFun::new(raw.table)
    }
}

impl From<EndoFun> for RawEndoFun {
    fn from(f: EndoFun) -> Self {
        RawEndoFun {
            n: f.table.len(),
            table: f.table,
        }
    }
}

impl EndoFun {
    pub fn new(table: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if let Some(bad) = table.iter().find(|&&t| t >= n) {
            return Err(Error::Parse(format!("target {bad} out of range for {n} points")));
        }
        Ok(EndoFun { table })
    }

    pub fn identity(n: usize) -> Self {
        EndoFun {
            table: (0..n).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `self . inner`
    pub fn compose(&self, inner: &EndoFun) -> EndoFun {
        assert_eq!(self.size(), inner.size(), "composing functions on different sets");
        EndoFun {
            table: inner.table.iter().map(|&x| self.table[x]).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> EndoFun {
        (0..k).fold(EndoFun::identity(self.size()), |acc, _| self.compose(&acc))
    }

    pub fn image(&self) -> Vec<usize> {
        let mut seen = vec![false; self.size()];
        for &t in &self.table {
            seen[t] = true;
        }
        (0..self.size()).filter(|&i| seen[i]).collect()
    }

    /// Every endofunction on `n` points, in lexicographic order of tables.
    pub fn all(n: usize) -> impl Iterator<Item = EndoFun> {
        let total = n.checked_pow(n as u32).unwrap_or(usize::MAX);
        (0..total).map(move |mut code| {
            let mut table = vec![0; n];
            for slot in table.iter_mut().rev() {
                *slot = code % n;
                code /= n;
            }
            EndoFun { table }
        })
    }
}

/// The stable image `im(f^k) = im(f^{k+1})` and the least such `k`.
pub fn eventual_image(f: &EndoFun) -> (Vec<usize>, usize) {
    let mut current: Vec<usize> = (0..f.size()).collect();
    let mut k = 0;
    loop {
        let mut next: Vec<usize> = current.iter().map(|&x| f.apply(x)).collect();
        next.sort_unstable();
        next.dedup();
        if next.len() == current.len() {
            return (current, k);
        }
        current = next;
        k += 1;
    }
}

/// `f^D(x) = g^{k+1}(f^k(x))` where `g` inverts `f` on its stable image.
///
/// Applying `g` only once is correct exactly when `f` fixes its stable image
/// pointwise; `[1, 2, 1]` is the smallest case where it is not.
pub fn endo_drazin(f: &EndoFun) -> (EndoFun, usize) {
    let (stable, k) = eventual_image(f);
    let n = f.size();
    let mut inverse = vec![usize::MAX; n];
    for &y in &stable {
        let fy = f.apply(y);
        debug_assert_eq!(inverse[fy], usize::MAX, "f is not injective on its stable image");
        inverse[fy] = y;
    }
    let fk = f.pow(k);
    let table = (0..n)
        .map(|x| (0..=k).fold(fk.apply(x), |y, _| inverse[y]))
        .collect();
    (EndoFun { table }, k)
}

/// A finite monoid presented by its multiplication.
pub trait Monoid {
    type Elem: Clone + Eq + Hash;

    fn identity(&self) -> Self::Elem;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Number of elements, if cheap to know.
    fn order(&self) -> Option<usize> {
        None
    }

    fn pow(&self, x: &Self::Elem, k: usize) -> Self::Elem {
        (0..k).fold(self.identity(), |acc, _| self.mul(&acc, x))
    }
}

/// Integers modulo `n` under multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MulMod(pub u64);

impl Monoid for MulMod {
    type Elem = u64;

    fn identity(&self) -> u64 {
        1 % self.0
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }

    fn order(&self) -> Option<usize> {
        usize::try_from(self.0).ok()
    }
}

/// All endofunctions of `n` points under composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformationMonoid(pub usize);

impl Monoid for TransformationMonoid {
    type Elem = EndoFun;

    fn identity(&self) -> EndoFun {
        EndoFun::identity(self.0)
    }

    fn mul(&self, a: &EndoFun, b: &EndoFun) -> EndoFun {
        a.compose(b)
    }

    fn order(&self) -> Option<usize> {
        self.0.checked_pow(self.0 as u32)
    }
}

/// Square matrices of a fixed size under multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixMonoid {
    pub field: FieldDescriptor,
    pub size: usize,
}

impl Monoid for MatrixMonoid {
    type Elem = Matrix;

    fn identity(&self) -> Matrix {
        Matrix::identity(self.field, self.size)
    }

    fn mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a * b
    }

    fn order(&self) -> Option<usize> {
        let q = usize::try_from(self.field.order()?).ok()?;
        let cells = u32::try_from(self.size * self.size).ok()?;
        q.checked_pow(cells)
    }

    fn pow(&self, x: &Matrix, k: usize) -> Matrix {
        x.pow(k)
    }
}

/// Steps that always suffice to close the power cycle of an `n x n` matrix
/// over a field with `q` elements: a tail of at most `n` followed by a cycle
/// of period below `q^n`.
pub fn matrix_cycle_bound(q: u64, n: usize) -> usize {
    let period = u32::try_from(n)
        .ok()
        .and_then(|n| usize::try_from(q).ok()?.checked_pow(n))
        .unwrap_or(usize::MAX);
    n.saturating_add(period).saturating_add(1)
}

/// Drazin inverse of a monoid element from its first repeated power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidDrazin<E> {
    pub inverse: E,
    /// An index at which the first Drazin axiom holds; not necessarily least.
    pub index_bound: usize,
    /// Tail length `m` and period `k` with `x^m = x^{m+k}`.
    pub tail: usize,
    pub period: usize,
}

/// Finds the first repeat `x^m = x^{m+k}` within `max_steps` powers and
/// returns `x^{k-1}` when `m = 0`, `x^m` when `k = 1`, and `x^{mk-1}`
/// otherwise.
pub fn monoid_drazin<M: Monoid>(
    monoid: &M,
    x: &M::Elem,
    max_steps: usize,
) -> Result<MonoidDrazin<M::Elem>> {
    let mut seen: HashMap<M::Elem, usize> = HashMap::new();
    let mut powers = Vec::new();
    let mut current = monoid.identity();
    let (tail, period) = loop {
        if powers.len() > max_steps {
            return Err(Error::CycleNotFound { max_steps });
        }
        if let Some(&m) = seen.get(&current) {
            break (m, powers.len() - m);
        }
        seen.insert(current.clone(), powers.len());
        let next = monoid.mul(&current, x);
        powers.push(current);
        current = next;
    };
    let power = |e: usize| {
        powers
            .get(e)
            .cloned()
            .unwrap_or_else(|| powers[tail + (e - tail) % period].clone())
    };
    let (inverse, index_bound) = match (tail, period) {
        (0, k) => (power(k - 1), 0),
        (m, 1) => (power(m), m),
        (m, k) => (power(m * k - 1), m * k),
    };
    Ok(MonoidDrazin {
        inverse,
        index_bound,
        tail,
        period,
    })
}

/// Labels of the Drazin axioms failing for `(x, xd)` at index `k`.
pub fn monoid_drazin_failures<M: Monoid>(
    monoid: &M,
    x: &M::Elem,
    xd: &M::Elem,
    k: usize,
) -> Vec<&'static str> {
    let xk = monoid.pow(x, k);
    let mut failed = Vec::new();
    if monoid.mul(&monoid.mul(&xk, x), xd) != xk {
        failed.push("D.1");
    }
    if monoid.mul(&monoid.mul(xd, x), xd) != *xd {
        failed.push("D.2");
    }
    if monoid.mul(xd, x) != monoid.mul(x, xd) {
        failed.push("D.3");
    }
    failed
}

/// Lowers an index bound while the first Drazin axiom keeps holding.
pub fn minimal_monoid_index<M: Monoid>(monoid: &M, x: &M::Elem, xd: &M::Elem, bound: usize) -> usize {
    let mut k = bound;
    while k > 0 {
        let lower = monoid.pow(x, k - 1);
        if monoid.mul(&monoid.mul(&lower, x), xd) != lower {
            break;
        }
        k -= 1;
    }
    k
}
