//! Drazin index and Drazin inverse of a square matrix.
//!
//! The primary construction stabilises the rank chain `rank(x^0) >= rank(x^1)
//! >= ...`, factors the stable power through its image and inverts the induced
//! automorphism of that image. Alternative constructions live in
//! [`crate::decomp`] (image-kernel) and [`crate::finite`] (power cycles).

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Which construction produced a [`DrazinData`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    RankFactorization,
    ImageKernel,
    MonoidCycle,
}

/// A Drazin inverse together with its index and induced idempotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DrazinData {
    pub inverse: Matrix,
    pub index: usize,
    /// `x * x^D`, which equals `x^D * x`.
    pub idempotent: Matrix,
    pub route: Route,
}

impl DrazinData {
    pub fn new(x: &Matrix, inverse: Matrix, index: usize, route: Route) -> Self {
        let idempotent = x * &inverse;
        DrazinData {
            inverse,
            index,
            idempotent,
            route,
        }
    }

    /// Re-checks all three Drazin axioms, minimality of the index and the
    /// idempotent against `x`.
    pub fn verify(&self, x: &Matrix) -> Result<()> {
        x.ensure_square()?;
        let xd = &self.inverse;
        if xd.field() != x.field() || xd.rows() != x.rows() || xd.cols() != x.cols() {
            return Err(Error::StaleDrazinData);
        }
        let k = self.index;
        let xk = x.pow(k);
        let first = &(&xk * x) * xd == xk;
        let minimal = k == 0 || &xk * xd != x.pow(k - 1);
        let second = &(xd * x) * xd == *xd;
        let third = xd * x == x * xd;
        let idem = self.idempotent == x * xd;
        if first && minimal && second && third && idem {
            Ok(())
        } else {
            Err(Error::StaleDrazinData)
        }
    }

    /// `I - e_x`.
    pub fn complement(&self) -> Matrix {
        &Matrix::identity(self.idempotent.field(), self.idempotent.rows()) - &self.idempotent
    }

    pub fn to_json(&self) -> Value {
        json!({
            "inverse": self.inverse.to_json(),
            "index": self.index,
            "idempotent": self.idempotent.to_json(),
            "route": self.route,
        })
    }
}

/// `rank(x^0), rank(x^1), ...` up to and including the first repeated value.
pub fn rank_chain(x: &Matrix) -> Result<Vec<usize>> {
    let n = x.ensure_square()?;
    let mut ranks = vec![n];
    let mut power = Matrix::identity(x.field(), n);
    loop {
        power = &power * x;
        let r = power.rank();
        let prev = *ranks.last().expect("chain starts non-empty");
        ranks.push(r);
        if r == prev {
            return Ok(ranks);
        }
    }
}

/// Least `k` with `rank(x^k) = rank(x^{k+1})`; never more than the size.
pub fn drazin_index(x: &Matrix) -> Result<usize> {
    Ok(rank_chain(x)?.len() - 2)
}

/// Drazin inverse via full-rank factorisation of a stable power.
///
/// With `k` the index and `x^{k+1} = L * R` factored through its image,
/// `beta = R * L` is invertible, `gamma = beta^-1 * R * x * L` is the
/// automorphism `x` induces on the image (`x * L = L * gamma`,
/// `gamma^{k+1} = beta`), and `x^D = L * gamma^{-(k+2)} * R` with
/// `gamma^-1 = gamma^k * beta^-1`.
pub fn drazin_inverse(x: &Matrix) -> Result<DrazinData> {
    let n = x.ensure_square()?;
    let field = x.field();
    let k = drazin_index(x)?;
    if k == 0 {
        let inv = x.inverse()?;
        return Ok(DrazinData {
            inverse: inv,
            index: 0,
            idempotent: Matrix::identity(field, n),
            route: Route::RankFactorization,
        });
    }
    let fact = x.pow(k + 1).full_rank_factorization();
    let (left, right) = (&fact.left, &fact.right);
    let beta = right * left;
    let beta_inv = beta.inverse().map_err(|_| {
        Error::InternalInconsistency(format!("image core singular at stable index {k}"))
    })?;
    let gamma = &(&(&beta_inv * right) * x) * left;
    let gamma_inv = &gamma.pow(k) * &beta_inv;
    let inverse = &(left * &gamma_inv.pow(k + 2)) * right;
    Ok(DrazinData::new(x, inverse, k, Route::RankFactorization))
}

/// The group inverse, which exists exactly when the index is at most one.
pub fn group_inverse(x: &Matrix) -> Result<Matrix> {
    let d = drazin_inverse(x)?;
    if d.index > 1 {
        return Err(Error::NoGroupInverse { index: d.index });
    }
    Ok(d.inverse)
}

/// Builds `x^D` from strong pi-regularity witnesses.
///
/// Requires `x^{p+1} * y = x^p` and `z * x^{q+1} = x^q`; with
/// `k = max(p, q)` the result is `z^{k+1} * x^k`. Witnesses that fail their
/// equation are rejected.
pub fn drazin_from_pi_witnesses(
    x: &Matrix,
    y: &Matrix,
    p: usize,
    z: &Matrix,
    q: usize,
) -> Result<Matrix> {
    let n = x.ensure_square()?;
    for (name, w) in [("y", y), ("z", z)] {
        x.same_field(w)?;
        if w.rows() != n || w.cols() != n {
            return Err(Error::ShapeMismatch(format!("witness {name} must be {n}x{n}")));
        }
    }
    let xp = x.pow(p);
    if &(&xp * x) * y != xp {
        return Err(Error::WitnessInvalid(format!("x^{} * y != x^{p}", p + 1)));
    }
    let xq = x.pow(q);
    if &(z * &xq) * x != xq {
        return Err(Error::WitnessInvalid(format!("z * x^{} != x^{q}", q + 1)));
    }
    let k = p.max(q);
    Ok(&z.pow(k + 1) * &x.pow(k))
}
