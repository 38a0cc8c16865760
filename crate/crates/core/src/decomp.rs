//! Decompositions attached to a Drazin endomorphism: idempotent splittings,
//! the splitting isomorphism, core-nilpotent and Fitting decompositions, the
//! image-kernel construction of `x^D`, and eventuating families.
//!
//! Every function that takes a [`DrazinData`] re-verifies it against `x` first
//! and fails with [`Error::StaleDrazinData`] otherwise.

use serde_json::{json, Value};

use crate::drazin::{drazin_index, DrazinData, Route};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `e = section * retraction` and `retraction * section = I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdempotentSplitting {
    /// `through_dim x n`
    pub retraction: Matrix,
    /// `n x through_dim`
    pub section: Matrix,
    pub through_dim: usize,
}

impl IdempotentSplitting {
    pub fn idempotent(&self) -> Matrix {
        &self.section * &self.retraction
    }

    pub fn to_json(&self) -> Value {
        json!({
            "retraction": self.retraction.to_json(),
            "section": self.section.to_json(),
            "through_dim": self.through_dim,
        })
    }
}

pub fn split_idempotent(e: &Matrix) -> Result<IdempotentSplitting> {
    e.ensure_square()?;
    if !e.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    let f = e.full_rank_factorization();
    let split = IdempotentSplitting {
        retraction: f.right,
        section: f.left,
        through_dim: f.rank,
    };
    if !(&split.retraction * &split.section).is_identity() {
        return Err(Error::InternalInconsistency(
            "rank factors of an idempotent do not compose to the identity".into(),
        ));
    }
    Ok(split)
}

/// The automorphism `alpha = r * x * s` that `x` induces on the retract of
/// `e_x`. Its inverse is `r * x^D * s`.
pub fn splitting_iso(x: &Matrix, d: &DrazinData) -> Result<Matrix> {
    d.verify(x)?;
    let split = split_idempotent(&d.idempotent)?;
    Ok(&(&split.retraction * x) * &split.section)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreNilpotent {
    pub core: Matrix,
    pub nilpotent_part: Matrix,
    /// Least `m` with `nilpotent_part^m = 0`.
    pub nilpotent_index: usize,
}

impl CoreNilpotent {
    /// Labels of the core-nilpotent axioms that fail for `x`.
    pub fn failed_axioms(&self, x: &Matrix) -> Vec<&'static str> {
        cnd_failures(x, &self.core, &self.nilpotent_part, self.nilpotent_index)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "core": self.core.to_json(),
            "nilpotent_part": self.nilpotent_part.to_json(),
            "nilpotent_index": self.nilpotent_index,
        })
    }
}

pub(crate) fn cnd_failures(x: &Matrix, c: &Matrix, n: &Matrix, m: usize) -> Vec<&'static str> {
    let mut failed = Vec::new();
    if !matches!(drazin_index(c), Ok(k) if k <= 1) {
        failed.push("CND.1");
    }
    if !n.is_square() || !n.pow(m).is_zero() {
        failed.push("CND.2");
    }
    let cn = c.try_mul(n);
    let nc = n.try_mul(c);
    if !matches!((cn, nc), (Ok(a), Ok(b)) if a.is_zero() && b.is_zero()) {
        failed.push("CND.3");
    }
    if c.try_add(n).as_ref() != Ok(x) {
        failed.push("CND.4");
    }
    failed
}

/// Least `m` with `n^m = 0`, or `None` if `n` is not nilpotent.
pub fn nilpotency_index(n: &Matrix) -> Option<usize> {
    let size = n.rows();
    let mut power = Matrix::identity(n.field(), size);
    for m in 0..=size {
        if power.is_zero() {
            return Some(m);
        }
        power = &power * n;
    }
    None
}

pub fn core_nilpotent(x: &Matrix, d: &DrazinData) -> Result<CoreNilpotent> {
    d.verify(x)?;
    let core = &(x * &d.inverse) * x;
    let nilpotent_part = x - &core;
    let nilpotent_index = nilpotency_index(&nilpotent_part).ok_or_else(|| {
        Error::InternalInconsistency("x - x x^D x is not nilpotent".into())
    })?;
    Ok(CoreNilpotent {
        core,
        nilpotent_part,
        nilpotent_index,
    })
}

/// Checks `x^D = x^k (x^{k+1} + I - e_x)^-1 = (x^{k+1} + I - e_x)^-1 x^k`.
pub fn complement_formula_check(x: &Matrix, d: &DrazinData) -> Result<bool> {
    d.verify(x)?;
    let k = d.index;
    let xk = x.pow(k);
    let shifted = &(&xk * x) + &d.complement();
    let Ok(inv) = shifted.inverse() else {
        return Ok(false);
    };
    Ok(&xk * &inv == d.inverse && &inv * &xk == d.inverse)
}

/// Checks that `x^{k+1}` commutes with `e_x` through it and that
/// `x^{k+1} + I - e_x` is invertible.
pub fn munn_power_iso_check(x: &Matrix, d: &DrazinData) -> Result<bool> {
    d.verify(x)?;
    let e = &d.idempotent;
    let top = x.pow(d.index + 1);
    let absorbs = e * &top == top && &top * e == top;
    Ok(absorbs && (&top + &d.complement()).is_invertible())
}

/// `x = p * diag(alpha, eta) * p^-1` with `alpha` invertible and `eta`
/// nilpotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FittingData {
    pub change_of_basis: Matrix,
    pub change_of_basis_inverse: Matrix,
    pub invertible_block: Matrix,
    pub nilpotent_block: Matrix,
    pub split: IdempotentSplitting,
    pub complement_split: IdempotentSplitting,
}

impl FittingData {
    /// `p * diag(alpha, eta) * p^-1`.
    pub fn rebuild(&self) -> Matrix {
        let block = Matrix::block_diag(&self.invertible_block, &self.nilpotent_block)
            .expect("blocks share a field");
        &(&self.change_of_basis * &block) * &self.change_of_basis_inverse
    }

    /// `p * diag(alpha^-1, 0) * p^-1`.
    pub fn drazin_inverse(&self) -> Result<Matrix> {
        let inv = self.invertible_block.inverse()?;
        let zero = Matrix::zeros(
            inv.field(),
            self.nilpotent_block.rows(),
            self.nilpotent_block.cols(),
        );
        let block = Matrix::block_diag(&inv, &zero)?;
        Ok(&(&self.change_of_basis * &block) * &self.change_of_basis_inverse)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "change_of_basis": self.change_of_basis.to_json(),
            "invertible_block": self.invertible_block.to_json(),
            "nilpotent_block": self.nilpotent_block.to_json(),
        })
    }
}

pub fn fitting_decomposition(x: &Matrix, d: &DrazinData) -> Result<FittingData> {
    d.verify(x)?;
    let split = split_idempotent(&d.idempotent)?;
    let complement_split = split_idempotent(&d.complement())?;
    let p = split.section.hstack(&complement_split.section)?;
    let p_inv = split.retraction.vstack(&complement_split.retraction)?;
    if !(&p * &p_inv).is_identity() {
        return Err(Error::InternalInconsistency(
            "splittings of e_x and its complement do not form a basis".into(),
        ));
    }
    let alpha = &(&split.retraction * x) * &split.section;
    let core = &(x * &d.inverse) * x;
    let nil = x - &core;
    let eta = &(&complement_split.retraction * &nil) * &complement_split.section;
    if !alpha.is_invertible() || nilpotency_index(&eta).is_none() {
        return Err(Error::InternalInconsistency(
            "Fitting blocks are not invertible and nilpotent".into(),
        ));
    }
    Ok(FittingData {
        change_of_basis: p,
        change_of_basis_inverse: p_inv,
        invertible_block: alpha,
        nilpotent_block: eta,
        split,
        complement_split,
    })
}

/// Drazin inverse via the decomposition of the space into the image and
/// kernel of the stable power `x^{k+1}`.
pub fn image_kernel_drazin(x: &Matrix) -> Result<DrazinData> {
    let n = x.ensure_square()?;
    let k = drazin_index(x)?;
    let top = x.pow(k + 1);
    let iota = top.image_basis();
    let kappa = top.kernel_basis();
    let r = iota.cols();
    let psi = iota.hstack(&kappa)?;
    let psi_inv = psi.inverse().map_err(|_| {
        Error::InternalInconsistency(format!("image and kernel of x^{} do not span", k + 1))
    })?;
    let phi1 = psi_inv.select_rows(&(0..r).collect::<Vec<_>>());
    let phi2 = psi_inv.select_rows(&(r..n).collect::<Vec<_>>());
    let alpha = &(&phi1 * x) * &iota;
    let eta = &(&phi2 * x) * &kappa;
    let alpha_inv = alpha.inverse().map_err(|_| {
        Error::InternalInconsistency("x restricted to its stable image is singular".into())
    })?;
    if nilpotency_index(&eta).is_none() {
        return Err(Error::InternalInconsistency(
            "x restricted to the stable kernel is not nilpotent".into(),
        ));
    }
    let inverse = &(&iota * &alpha_inv) * &phi1;
    Ok(DrazinData::new(x, inverse, k, Route::ImageKernel))
}

/// Sections `s_i` and retractions `r_i` for `i` in `-window..=window`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuatingFamily {
    pub window: usize,
    pub sections: Vec<Matrix>,
    pub retractions: Vec<Matrix>,
    pub index: usize,
}

impl EventuatingFamily {
    fn slot(&self, i: isize) -> usize {
        let w = self.window as isize;
        assert!((-w..=w).contains(&i), "index {i} outside window {w}");
        (i + w) as usize
    }

    pub fn section(&self, i: isize) -> &Matrix {
        &self.sections[self.slot(i)]
    }

    pub fn retraction(&self, i: isize) -> &Matrix {
        &self.retractions[self.slot(i)]
    }

    /// Labels of the eventuating axioms that fail for `x` across the window.
    pub fn failed_axioms(&self, x: &Matrix) -> Vec<&'static str> {
        let w = self.window as isize;
        let top = x.pow(self.index + 1);
        let mut ok = [true; 4];
        let reference = self.section(-w) * self.retraction(-w);
        for i in -w..=w {
            let (s, r) = (self.section(i), self.retraction(i));
            ok[0] &= (r * s).is_identity();
            let e = s * r;
            ok[1] &= e == reference;
            if i < w {
                ok[2] &= x * s == *self.section(i + 1) && self.retraction(i + 1) * x == *r;
            }
            ok[3] &= &e * &top == top && &top * &e == top;
        }
        ["EV.1", "EV.2", "EV.3", "EV.4"]
            .into_iter()
            .zip(ok)
            .filter(|(_, good)| !good)
            .map(|(label, _)| label)
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "window": self.window,
            "index": self.index,
            "sections": self.sections.iter().map(Matrix::to_json).collect::<Vec<_>>(),
            "retractions": self.retractions.iter().map(Matrix::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Window used when the caller does not pick one.
pub fn default_window(d: &DrazinData) -> usize {
    d.index + 2
}

/// Shifts the splitting of `e_x` along powers of `x` and `x^D`:
/// `s_i = x^i s`, `r_i = r (x^D)^i` for `i > 0` and
/// `s_i = (x^D)^{-i} s`, `r_i = r x^{-i}` for `i < 0`.
pub fn eventuating_family(x: &Matrix, d: &DrazinData, window: usize) -> Result<EventuatingFamily> {
    d.verify(x)?;
    let split = split_idempotent(&d.idempotent)?;
    let (s, r) = (&split.section, &split.retraction);
    let mut sections = Vec::with_capacity(2 * window + 1);
    let mut retractions = Vec::with_capacity(2 * window + 1);
    for m in (1..=window).rev() {
        sections.push(&d.inverse.pow(m) * s);
        retractions.push(r * &x.pow(m));
    }
    sections.push(s.clone());
    retractions.push(r.clone());
    for m in 1..=window {
        sections.push(&x.pow(m) * s);
        retractions.push(r * &d.inverse.pow(m));
    }
    Ok(EventuatingFamily {
        window,
        sections,
        retractions,
        index: d.index,
    })
}
