//! Exact axiom checkers and brute-force oracles.
//!
//! Checkers evaluate each labelled axiom of a system by exact equality and
//! report which ones fail. The brute-force oracle searches a finite candidate
//! set for elements passing the Drazin axioms; since Drazin inverses are
//! unique, a second survivor is reported as an internal inconsistency.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decomp::{cnd_failures, image_kernel_drazin, EventuatingFamily};
use crate::drazin::{drazin_inverse, Route};
use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::finite::{matrix_cycle_bound, minimal_monoid_index, monoid_drazin, MatrixMonoid, Monoid};
use crate::linalg::Matrix;
use crate::pairs::{mp_failures, pair_drazin_failures, pair_group_failures, OpposingPair};

/// Largest candidate set the brute-force oracle will walk.
pub const ENUMERATION_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxiomSystem {
    D,
    G,
    DV,
    GV,
    MP,
    CND,
    EV,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub system: AxiomSystem,
    pub passed: bool,
    pub failed_axioms: Vec<String>,
    pub witnessed_index: Option<usize>,
}

impl AxiomReport {
    fn new(system: AxiomSystem, failed: Vec<&'static str>, witnessed_index: Option<usize>) -> Self {
        AxiomReport {
            system,
            passed: failed.is_empty(),
            failed_axioms: failed.into_iter().map(String::from).collect(),
            witnessed_index,
        }
    }
}

/// The objects an axiom system talks about.
#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    /// An endomorphism and a claimed Drazin or group inverse.
    Endo { x: &'a Matrix, xd: &'a Matrix },
    /// An opposing pair and a claimed inverse pair.
    Pair {
        pair: &'a OpposingPair,
        g_over_f: &'a Matrix,
        f_over_g: &'a Matrix,
    },
    /// A map and a claimed Moore-Penrose inverse.
    MoorePenrose { f: &'a Matrix, pseudo: &'a Matrix },
    /// A claimed core-nilpotent decomposition of `x`.
    CoreNilpotent {
        x: &'a Matrix,
        core: &'a Matrix,
        nilpotent: &'a Matrix,
        nilpotent_index: usize,
    },
    Eventuating {
        x: &'a Matrix,
        family: &'a EventuatingFamily,
    },
}

fn wrong_subject(system: AxiomSystem) -> Error {
    Error::ShapeMismatch(format!("subject does not carry the objects of system {system:?}"))
}

/// Least `k` in `0..=bound` with `x^{k+1} * xd = x^k`.
fn witnessed_index(x: &Matrix, xd: &Matrix, bound: usize) -> Option<usize> {
    let mut power = Matrix::identity(x.field(), x.rows());
    for k in 0..=bound {
        if &(&power * x) * xd == power {
            return Some(k);
        }
        power = &power * x;
    }
    None
}

fn endo_shapes(x: &Matrix, xd: &Matrix) -> Result<()> {
    x.ensure_square()?;
    x.same_field(xd)?;
    if xd.rows() != x.rows() || xd.cols() != x.cols() {
        return Err(Error::ShapeMismatch(format!(
            "candidate is {}x{}, expected {}x{}",
            xd.rows(),
            xd.cols(),
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

pub fn check_axioms(system: AxiomSystem, subject: Subject<'_>) -> Result<AxiomReport> {
    use AxiomSystem as S;
    match (system, subject) {
        (S::D, Subject::Endo { x, xd }) => {
            endo_shapes(x, xd)?;
            let index = witnessed_index(x, xd, x.rows());
            let mut failed = Vec::new();
            if index.is_none() {
                failed.push("D.1");
            }
            if &(xd * x) * xd != *xd {
                failed.push("D.2");
            }
            if xd * x != x * xd {
                failed.push("D.3");
            }
            Ok(AxiomReport::new(system, failed, index))
        }
        (S::G, Subject::Endo { x, xd }) => {
            endo_shapes(x, xd)?;
            let mut failed = Vec::new();
            if &(x * xd) * x != *x {
                failed.push("G.1");
            }
            if &(xd * x) * xd != *xd {
                failed.push("G.2");
            }
            if xd * x != x * xd {
                failed.push("G.3");
            }
            Ok(AxiomReport::new(system, failed, None))
        }
        (S::DV, Subject::Pair { pair, g_over_f, f_over_g }) => {
            let (failed, index) = pair_drazin_failures(pair, g_over_f, f_over_g);
            Ok(AxiomReport::new(system, failed, index))
        }
        (S::GV, Subject::Pair { pair, g_over_f, f_over_g }) => Ok(AxiomReport::new(
            system,
            pair_group_failures(pair, g_over_f, f_over_g),
            None,
        )),
        (S::MP, Subject::MoorePenrose { f, pseudo }) => {
            f.same_field(pseudo)?;
            if (pseudo.rows(), pseudo.cols()) != (f.cols(), f.rows()) {
                return Err(Error::ShapeMismatch("pseudo-inverse has the wrong shape".into()));
            }
            Ok(AxiomReport::new(system, mp_failures(f, pseudo), None))
        }
        (
            S::CND,
            Subject::CoreNilpotent {
                x,
                core,
                nilpotent,
                nilpotent_index,
            },
        ) => {
            endo_shapes(x, core)?;
            endo_shapes(x, nilpotent)?;
            Ok(AxiomReport::new(
                system,
                cnd_failures(x, core, nilpotent, nilpotent_index),
                None,
            ))
        }
        (S::EV, Subject::Eventuating { x, family }) => {
            x.ensure_square()?;
            let consistent = family.sections.len() == 2 * family.window + 1
                && family.retractions.len() == family.sections.len()
                && family.sections.iter().zip(&family.retractions).all(|(s, r)| {
                    s.rows() == x.rows() && r.cols() == x.rows() && s.cols() == r.rows()
                });
            if !consistent {
                return Err(Error::ShapeMismatch("eventuating family does not fit x".into()));
            }
            Ok(AxiomReport::new(system, family.failed_axioms(x), Some(family.index)))
        }
        (system, _) => Err(wrong_subject(system)),
    }
}

/// The Drazin axioms in an arbitrary monoid, searching the index up to `bound`.
pub fn check_monoid_drazin<M: Monoid>(
    monoid: &M,
    x: &M::Elem,
    xd: &M::Elem,
    bound: usize,
) -> AxiomReport {
    let mut power = monoid.identity();
    let mut index = None;
    for k in 0..=bound {
        if monoid.mul(&monoid.mul(&power, x), xd) == power {
            index = Some(k);
            break;
        }
        power = monoid.mul(&power, x);
    }
    let mut failed = Vec::new();
    if index.is_none() {
        failed.push("D.1");
    }
    if monoid.mul(&monoid.mul(xd, x), xd) != *xd {
        failed.push("D.2");
    }
    if monoid.mul(xd, x) != monoid.mul(x, xd) {
        failed.push("D.3");
    }
    AxiomReport::new(AxiomSystem::D, failed, index)
}

/// The unique candidate satisfying the Drazin axioms for `x`, if any.
///
/// `bound` caps the index search. Walking more than [`ENUMERATION_LIMIT`]
/// candidates is refused.
pub fn brute_force_drazin<M, I>(
    monoid: &M,
    x: &M::Elem,
    candidates: I,
    bound: usize,
) -> Result<Option<M::Elem>>
where
    M: Monoid,
    I: IntoIterator<Item = M::Elem>,
{
    let candidates = candidates.into_iter();
    if candidates.size_hint().0 > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut survivor: Option<M::Elem> = None;
    for (seen, candidate) in candidates.enumerate() {
        if seen >= ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge {
                limit: ENUMERATION_LIMIT,
            });
        }
        if !check_monoid_drazin(monoid, x, &candidate, bound).passed {
            continue;
        }
        match &survivor {
            Some(existing) if *existing != candidate => {
                return Err(Error::InternalInconsistency(
                    "two distinct elements satisfy the Drazin axioms".into(),
                ));
            }
            _ => survivor = Some(candidate),
        }
    }
    Ok(survivor)
}

/// Every `rows x cols` matrix over a finite field, in lexicographic order of
/// entries.
pub fn all_matrices(
    field: FieldDescriptor,
    rows: usize,
    cols: usize,
) -> Result<impl Iterator<Item = Matrix>> {
    let elements = field
        .elements()
        .ok_or_else(|| Error::EnumerationTooLarge { limit: ENUMERATION_LIMIT })?;
    let q = elements.len();
    let cells = rows * cols;
    let total = u32::try_from(cells)
        .ok()
        .and_then(|c| q.checked_pow(c))
        .filter(|&t| t <= ENUMERATION_LIMIT)
        .ok_or(Error::EnumerationTooLarge {
            limit: ENUMERATION_LIMIT,
        })?;
    Ok((0..total).map(move |mut code| {
        let mut data = vec![elements[0].clone(); cells];
        for slot in data.iter_mut().rev() {
            *slot = elements[code % q].clone();
            code /= q;
        }
        Matrix::new(field, rows, cols, data).expect("entries come from the field")
    }))
}

/// Result of running every available construction on one matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub routes: Vec<(Route, Matrix, usize)>,
    /// Pairwise comparisons `(a, b, inverses equal and indices equal)`.
    pub comparisons: Vec<(Route, Route, bool)>,
}

impl AuditReport {
    pub fn all_agree(&self) -> bool {
        self.comparisons.iter().all(|c| c.2)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "routes": self.routes.iter().map(|(r, m, k)| json!({
                "route": r, "inverse": m.to_json(), "index": k
            })).collect::<Vec<_>>(),
            "comparisons": self.comparisons.iter().map(|(a, b, ok)| json!({
                "left": a, "right": b, "equal": ok
            })).collect::<Vec<_>>(),
            "all_agree": self.all_agree(),
        })
    }
}

/// The power-cycle construction on the multiplicative monoid of matrices;
/// only available over finite fields.
pub fn monoid_cycle_drazin(x: &Matrix) -> Result<Option<(Matrix, usize)>> {
    let n = x.ensure_square()?;
    let Some(q) = x.field().order() else {
        return Ok(None);
    };
    let monoid = MatrixMonoid {
        field: x.field(),
        size: n,
    };
    let r = monoid_drazin(&monoid, x, matrix_cycle_bound(q, n))?;
    let k = minimal_monoid_index(&monoid, x, &r.inverse, r.index_bound);
    Ok(Some((r.inverse, k)))
}

pub fn cross_route_audit(x: &Matrix) -> Result<AuditReport> {
    let a = drazin_inverse(x)?;
    let b = image_kernel_drazin(x)?;
    let mut routes = vec![
        (Route::RankFactorization, a.inverse, a.index),
        (Route::ImageKernel, b.inverse, b.index),
    ];
    if let Some((inv, k)) = monoid_cycle_drazin(x)? {
        routes.push((Route::MonoidCycle, inv, k));
    }
    let mut comparisons = Vec::new();
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            let same = routes[i].1 == routes[j].1 && routes[i].2 == routes[j].2;
            comparisons.push((routes[i].0, routes[j].0, same));
        }
    }
    Ok(AuditReport {
        routes,
        comparisons,
    })
}
