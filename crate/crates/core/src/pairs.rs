//! Opposing pairs `f: A -> B`, `g: B -> A` and their Drazin inverses, plus
//! Moore-Penrose inverses with the transpose as dagger.
//!
//! Products are written in the usual applicative order, so the endomorphism
//! "first `f`, then `g`" of `A` is `g * f`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::drazin::{drazin_inverse, DrazinData};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpposingPair {
    /// `f: A -> B`, a `dim B x dim A` matrix.
    pub forward: Matrix,
    /// `g: B -> A`, a `dim A x dim B` matrix.
    pub backward: Matrix,
}

impl OpposingPair {
    pub fn new(forward: Matrix, backward: Matrix) -> Result<Self> {
        forward.same_field(&backward)?;
        if forward.rows() != backward.cols() || forward.cols() != backward.rows() {
            return Err(Error::ShapeMismatch(format!(
                "pair of {}x{} and {}x{} does not compose both ways",
                forward.rows(),
                forward.cols(),
                backward.rows(),
                backward.cols()
            )));
        }
        Ok(OpposingPair { forward, backward })
    }

    pub fn swap(&self) -> OpposingPair {
        OpposingPair {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// `g * f`, an endomorphism of `A`.
    pub fn on_source(&self) -> Matrix {
        &self.backward * &self.forward
    }

    /// `f * g`, an endomorphism of `B`.
    pub fn on_target(&self) -> Matrix {
        &self.forward * &self.backward
    }
}

/// Drazin inverse of an opposing pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDrazinData {
    /// `A -> B`, equal to `(f g)^D f = f (g f)^D`.
    pub g_over_f: Matrix,
    /// `B -> A`, equal to `(g f)^D g = g (f g)^D`.
    pub f_over_g: Matrix,
    pub index: usize,
    /// Least `k` with `f_over_g * f * (g f)^k = (g f)^k`.
    pub source_index: usize,
    /// Least `k` with `g_over_f * g * (f g)^k = (f g)^k`.
    pub target_index: usize,
    /// Idempotent on `A`: `f_over_g * f = g * g_over_f`.
    pub idem_fg: Matrix,
    /// Idempotent on `B`: `f * f_over_g = g_over_f * g`.
    pub idem_gf: Matrix,
}

impl PairDrazinData {
    pub fn to_json(&self) -> Value {
        json!({
            "g_over_f": self.g_over_f.to_json(),
            "f_over_g": self.f_over_g.to_json(),
            "index": self.index,
            "source_index": self.source_index,
            "target_index": self.target_index,
            "idem_fg": self.idem_fg.to_json(),
            "idem_gf": self.idem_gf.to_json(),
        })
    }
}

/// Drazin inverses of both composites, the second obtained from the first.
///
/// Returns `((g f)^D, (f g)^D)` where `(f g)^D = f ((g f)^D)^2 g`, and fails
/// with `InternalInconsistency` if that disagrees with a direct computation.
pub fn cline(f: &Matrix, g: &Matrix) -> Result<(Matrix, Matrix)> {
    let pair = OpposingPair::new(f.clone(), g.clone())?;
    let source = drazin_inverse(&pair.on_source())?;
    let sq = source.inverse.pow(2);
    let derived = &(f * &sq) * g;
    let direct = drazin_inverse(&pair.on_target())?;
    if derived != direct.inverse {
        return Err(Error::InternalInconsistency(
            "transported Drazin inverse differs from the direct one".into(),
        ));
    }
    Ok((source.inverse, derived))
}

/// Least `k <= bound` with `m * endo^k == endo^k`.
fn least_absorbing_power(m: &Matrix, endo: &Matrix, bound: usize) -> Option<usize> {
    let mut power = Matrix::identity(endo.field(), endo.rows());
    for k in 0..=bound {
        if m * &power == power {
            return Some(k);
        }
        power = &power * endo;
    }
    None
}

fn pair_shapes_ok(pair: &OpposingPair, g_over_f: &Matrix, f_over_g: &Matrix) -> bool {
    let (f, g) = (&pair.forward, &pair.backward);
    g_over_f.field() == f.field()
        && f_over_g.field() == f.field()
        && (g_over_f.rows(), g_over_f.cols()) == (f.rows(), f.cols())
        && (f_over_g.rows(), f_over_g.cols()) == (g.rows(), g.cols())
}

/// The second and third axioms, shared by the Drazin and group systems.
fn second_and_third(pair: &OpposingPair, g_over_f: &Matrix, f_over_g: &Matrix) -> (bool, bool) {
    let (f, g) = (&pair.forward, &pair.backward);
    let second =
        &(f_over_g * f) * f_over_g == *f_over_g && &(g_over_f * g) * g_over_f == *g_over_f;
    let third = f_over_g * f == g * g_over_f && f * f_over_g == g_over_f * g;
    (second, third)
}

fn labels(names: [&'static str; 3], ok: [bool; 3]) -> Vec<&'static str> {
    names.into_iter().zip(ok).filter(|(_, ok)| !ok).map(|(l, _)| l).collect()
}

/// Evaluates the opposing-pair Drazin axioms for a candidate inverse.
///
/// Returns the failed labels and the least index witnessing the first axiom,
/// searched up to the larger of the two dimensions plus one.
pub fn pair_drazin_failures(
    pair: &OpposingPair,
    g_over_f: &Matrix,
    f_over_g: &Matrix,
) -> (Vec<&'static str>, Option<usize>) {
    if !pair_shapes_ok(pair, g_over_f, f_over_g) {
        return (vec!["DV.1", "DV.2", "DV.3"], None);
    }
    let (f, g) = (&pair.forward, &pair.backward);
    let bound = f.rows().max(f.cols()) + 1;
    let p = least_absorbing_power(&(f_over_g * f), &pair.on_source(), bound);
    let q = least_absorbing_power(&(g_over_f * g), &pair.on_target(), bound);
    let index = p.zip(q).map(|(p, q)| p.max(q));
    let (second, third) = second_and_third(pair, g_over_f, f_over_g);
    (labels(["DV.1", "DV.2", "DV.3"], [index.is_some(), second, third]), index)
}

/// Evaluates the opposing-pair group inverse axioms.
pub fn pair_group_failures(
    pair: &OpposingPair,
    g_over_f: &Matrix,
    f_over_g: &Matrix,
) -> Vec<&'static str> {
    if !pair_shapes_ok(pair, g_over_f, f_over_g) {
        return vec!["GV.1", "GV.2", "GV.3"];
    }
    let (f, g) = (&pair.forward, &pair.backward);
    let first = &(&(g * g_over_f) * g) * f == pair.on_source()
        && &(&(f * f_over_g) * f) * g == pair.on_target();
    let (second, third) = second_and_third(pair, g_over_f, f_over_g);
    labels(["GV.1", "GV.2", "GV.3"], [first, second, third])
}

pub fn pair_drazin(p: &OpposingPair) -> Result<PairDrazinData> {
    let (f, g) = (&p.forward, &p.backward);
    let source = drazin_inverse(&p.on_source())?;
    let target = drazin_inverse(&p.on_target())?;
    let f_over_g = &source.inverse * g;
    let g_over_f = &target.inverse * f;
    if f_over_g != g * &target.inverse || g_over_f != f * &source.inverse {
        return Err(Error::InternalInconsistency(
            "the two formulas for a pair Drazin inverse disagree".into(),
        ));
    }
    let bound = source.index.max(target.index);
    let source_index = least_absorbing_power(&(&f_over_g * f), &p.on_source(), bound);
    let target_index = least_absorbing_power(&(&g_over_f * g), &p.on_target(), bound);
    let (Some(source_index), Some(target_index)) = (source_index, target_index) else {
        return Err(Error::InternalInconsistency(
            "pair Drazin index exceeds the composite indices".into(),
        ));
    };
    let idem_fg = &f_over_g * f;
    let idem_gf = f * &f_over_g;
    if idem_fg != g * &g_over_f || idem_gf != &g_over_f * g {
        return Err(Error::InternalInconsistency(
            "induced idempotents of the pair disagree".into(),
        ));
    }
    Ok(PairDrazinData {
        g_over_f,
        f_over_g,
        index: source_index.max(target_index),
        source_index,
        target_index,
        idem_fg,
        idem_gf,
    })
}

/// Whether the pair inverse is a group inverse, i.e. the index is at most one.
pub fn check_pair_group(p: &OpposingPair, d: &PairDrazinData) -> Result<bool> {
    let (failed, index) = pair_drazin_failures(p, &d.g_over_f, &d.f_over_g);
    if !failed.is_empty() || index != Some(d.index) {
        return Err(Error::StaleDrazinData);
    }
    if d.index > 1 {
        return Ok(false);
    }
    if !pair_group_failures(p, &d.g_over_f, &d.f_over_g).is_empty() {
        return Err(Error::InternalInconsistency(
            "pair of index at most one fails the group axioms".into(),
        ));
    }
    Ok(true)
}

/// `f g f = f` and `g f g = g`.
pub fn check_binary_idempotent(p: &OpposingPair) -> Result<bool> {
    let (f, g) = (&p.forward, &p.backward);
    let holds = &(f * g) * f == *f && &(g * f) * g == *g;
    if holds && !(p.on_source().is_idempotent() && p.on_target().is_idempotent()) {
        return Err(Error::InternalInconsistency(
            "binary idempotent with non-idempotent composite".into(),
        ));
    }
    Ok(holds)
}

/// Ranks behind a Moore-Penrose existence decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GramWitness {
    pub rank: usize,
    /// rank of `f^T f`
    pub source_gram_rank: usize,
    /// rank of `f f^T`
    pub target_gram_rank: usize,
}

impl GramWitness {
    pub fn of(f: &Matrix) -> Self {
        let ft = f.transpose();
        GramWitness {
            rank: f.rank(),
            source_gram_rank: (&ft * f).rank(),
            target_gram_rank: (f * &ft).rank(),
        }
    }

    pub fn admits_inverse(&self) -> bool {
        self.rank == self.source_gram_rank && self.rank == self.target_gram_rank
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoorePenroseData {
    pub pseudo: Option<Matrix>,
    pub exists: bool,
    pub witness: GramWitness,
}

impl MoorePenroseData {
    pub fn to_json(&self) -> Value {
        json!({
            "exists": self.exists,
            "pseudo": self.pseudo.as_ref().map(Matrix::to_json),
            "witness": self.witness,
        })
    }
}

/// Labels of the Moore-Penrose axioms that fail for `(f, candidate)`.
pub fn mp_failures(f: &Matrix, candidate: &Matrix) -> Vec<&'static str> {
    if candidate.field() != f.field() || (candidate.rows(), candidate.cols()) != (f.cols(), f.rows())
    {
        return vec!["MP.1", "MP.2", "MP.3", "MP.4"];
    }
    let ff = f * candidate;
    let cf = candidate * f;
    let mut failed = Vec::new();
    if &ff * f != *f {
        failed.push("MP.1");
    }
    if &cf * candidate != *candidate {
        failed.push("MP.2");
    }
    if !ff.is_symmetric() {
        failed.push("MP.3");
    }
    if !cf.is_symmetric() {
        failed.push("MP.4");
    }
    failed
}

/// Moore-Penrose inverse from a full-rank factorisation `f = L R`:
/// `R^T (R R^T)^-1 (L^T L)^-1 L^T`, when both Gram blocks are invertible.
pub fn moore_penrose(f: &Matrix) -> Result<MoorePenroseData> {
    let witness = GramWitness::of(f);
    let fact = f.full_rank_factorization();
    let (l, r) = (&fact.left, &fact.right);
    let (lt, rt) = (l.transpose(), r.transpose());
    let grams = (&lt * l).inverse().ok().zip((r * &rt).inverse().ok());
    if grams.is_some() != witness.admits_inverse() {
        return Err(Error::InternalInconsistency(
            "Gram block invertibility disagrees with the rank criterion".into(),
        ));
    }
    let pseudo = grams.map(|(left_gram, right_gram)| {
        &(&(&rt * &right_gram) * &left_gram) * &lt
    });
    if let Some(candidate) = &pseudo {
        if !mp_failures(f, candidate).is_empty() {
            return Err(Error::InternalInconsistency(
                "constructed Moore-Penrose inverse fails its axioms".into(),
            ));
        }
    }
    Ok(MoorePenroseData {
        exists: pseudo.is_some(),
        pseudo,
        witness,
    })
}

/// Moore-Penrose inverse as the Drazin inverse of `f` over `f^T`, which is one
/// exactly when the pair index is at most one and `f f_over f = f`.
pub fn mp_via_pair_drazin(f: &Matrix) -> Result<MoorePenroseData> {
    let pair = OpposingPair::new(f.clone(), f.transpose())?;
    let d = pair_drazin(&pair)?;
    let exists = d.index <= 1 && &(f * &d.f_over_g) * f == *f;
    Ok(MoorePenroseData {
        pseudo: exists.then_some(d.f_over_g),
        exists,
        witness: GramWitness::of(f),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpReport {
    pub is_mp_drazin: bool,
    /// Which condition decided the answer.
    pub witness: &'static str,
}

/// Evaluates the three equivalent descriptions of a square matrix whose
/// Drazin and Moore-Penrose inverses coincide.
pub fn mp_drazin_check(x: &Matrix) -> Result<EpReport> {
    x.ensure_square()?;
    let d: DrazinData = drazin_inverse(x)?;
    let drazin_is_mp = mp_failures(x, &d.inverse).is_empty();
    let symmetric_idempotent = d.index <= 1 && d.idempotent.is_symmetric();
    let mp = moore_penrose(x)?;
    let commuting = match &mp.pseudo {
        Some(m) => x * m == m * x,
        None => false,
    };
    if drazin_is_mp != symmetric_idempotent || drazin_is_mp != commuting {
        return Err(Error::InternalInconsistency(format!(
            "EP conditions disagree: {drazin_is_mp}, {symmetric_idempotent}, {commuting}"
        )));
    }
    let witness = if drazin_is_mp {
        "all"
    } else if d.index > 1 {
        "index above one"
    } else if !mp.exists {
        "no Moore-Penrose inverse"
    } else {
        "induced idempotent not symmetric"
    };
    Ok(EpReport {
        is_mp_drazin: drazin_is_mp,
        witness,
    })
}
