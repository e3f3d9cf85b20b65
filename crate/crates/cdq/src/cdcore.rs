//! The Chermak-Delgado lattice of a form: exhaustive computation, poset
//! classification, the lattice-axiom checks, and the assertion/sampling
//! machinery used when exhaustion is out of reach.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffalg::{Fp, FpMatrix};
use crate::formspace::{scan_subspaces, subspace_count, AlternatingForm, Subspace};
use crate::structure::FieldAlgebra;

/// How a result was obtained; assertion and sampled modes carry weaker
/// completeness guarantees and say so.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CdMode {
    Exhaustive,
    Assertion,
    Sampled,
}

/// Per-mode statistics, echoed into reports for replay.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdEvidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspaces_scanned: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms_verified: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// The measure-maximizing subspaces. In exhaustive mode `members` is
/// complete; in assertion mode it is the bottom, the top, and the verified
/// atom list; sampled results only certify an upper-bound claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdResult {
    pub m_star_exp: u64,
    pub members: Vec<Subspace>,
    pub mode: CdMode,
    pub evidence: CdEvidence,
}

pub(crate) fn ensure_valid(f: &AlternatingForm) -> Result<()> {
    let report = f.validation();
    if !report.alternating {
        return Err(Error::Validation(
            "form is not alternating (slice fails S^T = -S with zero diagonal)".into(),
        ));
    }
    if !report.spans_w {
        return Err(Error::Validation(
            "form values do not span W (dead central coordinates)".into(),
        ));
    }
    if report.radical_dim != 0 {
        return Err(Error::NonzeroRadical(report.radical_dim));
    }
    Ok(())
}

/// Complete lattice by full enumeration. Refuses politely beyond `cap`.
pub fn cd_exhaustive(f: &AlternatingForm, cap: u128) -> Result<CdResult> {
    ensure_valid(f)?;
    let p = f.field().modulus();
    let d = f.dim_v();
    let expected = subspace_count(p, d);
    if expected > cap {
        return Err(Error::Capacity {
            what: format!("subspace count of F_{p}^{d}"),
            estimated: expected,
            cap,
            hint: Some("run in assertion mode (family forms) or raise the cap".into()),
        });
    }
    let mut best: u64 = 0;
    let mut members: Vec<Subspace> = Vec::new();
    let scanned = scan_subspaces(f.field(), d, |basis| {
        let exp = f.measure_exponent_of_basis(basis);
        if exp > best {
            best = exp;
            members.clear();
        }
        if exp == best {
            members.push(Subspace::from_rows(basis));
        }
    });
    if scanned != expected {
        return Err(Error::Internal(format!(
            "scanned {scanned} subspaces, expected {expected}"
        )));
    }
    members.sort();
    Ok(CdResult {
        m_star_exp: best,
        members,
        mode: CdMode::Exhaustive,
        evidence: CdEvidence {
            subspaces_scanned: Some(scanned),
            ..CdEvidence::default()
        },
    })
}

/// Poset shape of a lattice result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Chain,
    Quasiantichain,
    Other,
}

/// Classification of the member poset. `w`/`t` are only populated for
/// quasiantichains; `atoms` are the minimal members above the bottom in
/// every shape.
#[derive(Debug, Clone)]
pub struct PosetClass {
    pub shape: Shape,
    pub bottom: Subspace,
    pub top: Subspace,
    pub atoms: Vec<Subspace>,
    pub w: Option<usize>,
    pub t: Option<usize>,
}

/// Decides chain / quasiantichain / other by containment tests among the
/// members, and counts abelian (isotropic) atoms.
pub fn classify(res: &CdResult, f: &AlternatingForm) -> Result<PosetClass> {
    if res.mode == CdMode::Sampled {
        return Err(Error::Refusal(
            "sampled results only bound the maximal measure; classification refused".into(),
        ));
    }
    if res.members.is_empty() {
        return Err(Error::Internal("empty member list".into()));
    }
    let mut members = res.members.clone();
    members.sort();
    let bottom = members[0].clone();
    let top = members[members.len() - 1].clone();
    let bounded = members.iter().all(|u| u.contains(&bottom) && top.contains(u));

    // chain: pairwise comparable, i.e. strictly increasing dims with
    // consecutive containment once sorted
    let is_chain = bounded
        && members
            .windows(2)
            .all(|w| w[0].dim() < w[1].dim() && w[1].contains(&w[0]));
    if is_chain {
        let atoms = if members.len() >= 2 {
            vec![members[1].clone()]
        } else {
            vec![]
        };
        let t = atoms.iter().filter(|a| f.is_isotropic(a)).count();
        return Ok(PosetClass {
            shape: Shape::Chain,
            bottom,
            top,
            atoms,
            w: None,
            t: Some(t),
        });
    }

    let inner: Vec<Subspace> = members[1..members.len() - 1].to_vec();
    let pairwise_incomparable = inner.iter().enumerate().all(|(i, u)| {
        inner[i + 1..]
            .iter()
            .all(|v| !u.contains(v) && !v.contains(u))
    });
    if bounded && pairwise_incomparable && inner.len() >= 3 {
        let t = inner.iter().filter(|a| f.is_isotropic(a)).count();
        let w = inner.len();
        return Ok(PosetClass {
            shape: Shape::Quasiantichain,
            bottom,
            top,
            atoms: inner,
            w: Some(w),
            t: Some(t),
        });
    }

    // other: atoms are the minimal members above the bottom
    let atoms: Vec<Subspace> = inner
        .iter()
        .filter(|u| !inner.iter().any(|v| v != *u && u.contains(v)))
        .cloned()
        .collect();
    let t = atoms.iter().filter(|a| f.is_isotropic(a)).count();
    Ok(PosetClass {
        shape: Shape::Other,
        bottom,
        top,
        atoms,
        w: None,
        t: Some(t),
    })
}

/// Lattice-axiom audit over a complete member set: closure under sum and
/// intersection, perp mapping members to members, and perp being an
/// involution. Violations indicate implementation bugs, not mathematics.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub pairs_checked: usize,
    pub members_checked: usize,
    pub violations: Vec<String>,
    pub ok: bool,
}

pub fn verify_cd_axioms(res: &CdResult, f: &AlternatingForm) -> Result<AxiomReport> {
    if res.mode != CdMode::Exhaustive {
        return Err(Error::Refusal(
            "axiom verification needs a complete (exhaustive) member set".into(),
        ));
    }
    let set: HashSet<&Subspace> = res.members.iter().collect();
    let mut violations = Vec::new();
    let mut pairs = 0usize;
    for (i, u) in res.members.iter().enumerate() {
        for v in &res.members[i + 1..] {
            pairs += 1;
            if !set.contains(&u.sum(v)) {
                violations.push(format!(
                    "sum of members (dims {}, {}) is not a member",
                    u.dim(),
                    v.dim()
                ));
            }
            if !set.contains(&u.intersect(v)) {
                violations.push(format!(
                    "intersection of members (dims {}, {}) is not a member",
                    u.dim(),
                    v.dim()
                ));
            }
        }
    }
    for u in &res.members {
        let perp = f.perp(u)?;
        if !set.contains(&perp) {
            violations.push(format!("perp of a member (dim {}) is not a member", u.dim()));
            continue;
        }
        if &f.perp(&perp)? != u {
            violations.push(format!(
                "perp is not an involution on a member of dim {}",
                u.dim()
            ));
        }
    }
    Ok(AxiomReport {
        pairs_checked: pairs,
        members_checked: res.members.len(),
        violations: violations.clone(),
        ok: violations.is_empty(),
    })
}

/// Commutation-rank audit of a constructed family instance: for every
/// nonzero x in a block (one representative per scalar line), the rank of
/// v -> b(x, v) restricted to the family's assertion target.
#[derive(Debug, Clone, Serialize)]
pub struct AssertionReport {
    pub family: u8,
    pub reps_checked_x: usize,
    pub reps_checked_y: usize,
    pub min_rank_x: usize,
    pub max_rank_x: usize,
    pub min_rank_y: usize,
    pub max_rank_y: usize,
    /// (bound, exact): rank must equal the bound when exact, else dominate it.
    pub bound: usize,
    pub exact: bool,
    pub pass: bool,
}

pub fn assertion_check(f: &AlternatingForm) -> Result<AssertionReport> {
    let meta = f
        .meta()
        .ok_or_else(|| Error::InvalidParams("assertion checks need family metadata".into()))?
        .clone();
    ensure_valid(f)?;
    let n = meta.n();
    let d = f.dim_v();
    meta.check_layout(d)?;
    // one representative per scalar line; refuse absurd enumerations
    let p128 = f.field().modulus() as u128;
    let reps = (p128.saturating_pow(n as u32) - 1) / (p128 - 1);
    const MAX_REPS: u128 = 1 << 22;
    if reps > MAX_REPS {
        return Err(Error::Capacity {
            what: format!("projective block vectors of F_{}^{n}", f.field().modulus()),
            estimated: reps,
            cap: MAX_REPS,
            hint: None,
        });
    }
    // columns the commutation map is restricted to, per block side
    let (x_cols, y_cols): (std::ops::Range<usize>, std::ops::Range<usize>) = match meta.family {
        1 => (0..d, 0..d),
        2 => (n..d, 0..n),
        _ => (0..n, n..d),
    };
    let (bound, exact) = match meta.family {
        1 => (n, true),
        _ => ((meta.r - 1) * meta.a, false),
    };

    let rank_of = |x: &[u32], cols: &std::ops::Range<usize>| -> usize {
        // rank of the m x |cols| matrix with rows (x^T S_s) restricted to cols
        let mut red = crate::ffalg::RowReducer::new(f.field(), cols.len());
        for s in f.slices() {
            let full = s.vec_mul(x);
            red.add_row(full[cols.clone()].to_vec());
        }
        red.rank()
    };

    let run_side = |embed: usize, cols: &std::ops::Range<usize>| -> (usize, usize, usize) {
        let p = f.field().modulus() as u64;
        let mut min_rank = usize::MAX;
        let mut max_rank = 0usize;
        let mut reps = 0usize;
        // projective representatives: first nonzero coordinate equals 1
        for lead in 0..n {
            let free = n - lead - 1;
            let total = p.pow(free as u32);
            for idx in 0..total {
                let mut x = vec![0u32; d];
                x[embed + lead] = 1;
                let mut rest = idx;
                for c in 0..free {
                    x[embed + lead + 1 + c] = (rest % p) as u32;
                    rest /= p;
                }
                let rank = rank_of(&x, cols);
                min_rank = min_rank.min(rank);
                max_rank = max_rank.max(rank);
                reps += 1;
            }
        }
        (reps, min_rank, max_rank)
    };

    let (reps_x, min_x, max_x) = run_side(0, &x_cols);
    let (reps_y, min_y, max_y) = run_side(n, &y_cols);
    let pass = if exact {
        min_x == bound && max_x == bound && min_y == bound && max_y == bound
    } else {
        min_x >= bound && min_y >= bound
    };
    Ok(AssertionReport {
        family: meta.family,
        reps_checked_x: reps_x,
        reps_checked_y: reps_y,
        min_rank_x: min_x,
        max_rank_x: max_x,
        min_rank_y: min_y,
        max_rank_y: max_y,
        bound,
        exact,
        pass,
    })
}

/// Probabilistic maximality certificate: N seeded pseudo-random subspaces,
/// none may exceed the claimed exponent. The sampling distribution (uniform
/// dimension, then a random matrix's row space) is not uniform over
/// subspaces; only an "<= m*" certificate is sought.
#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub claimed_m_star_exp: u64,
    pub samples_drawn: u64,
    pub seed: u64,
    /// `true` when N = 0: a vacuous pass provides no evidence.
    pub vacuous: bool,
    /// First counterexample found, verbatim: (basis rows, exponent).
    pub violation: Option<(Vec<Vec<u32>>, u64)>,
    pub pass: bool,
}

pub fn sample_check(
    f: &AlternatingForm,
    claimed_m_star_exp: u64,
    samples: u64,
    seed: u64,
) -> Result<SampleReport> {
    ensure_valid(f)?;
    let d = f.dim_v();
    let p = f.field().modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violation = None;
    let mut drawn = 0u64;
    for _ in 0..samples {
        drawn += 1;
        let k = rng.random_range(0..=d);
        let rows: Vec<Vec<u32>> = (0..k)
            .map(|_| (0..d).map(|_| rng.random_range(0..p)).collect())
            .collect();
        let basis = FpMatrix::from_rows(f.field(), &rows)?;
        let sub = Subspace::from_rows(&if rows.is_empty() {
            FpMatrix::zeros(f.field(), 0, d)
        } else {
            basis
        });
        let exp = f.measure_exponent_of_basis(sub.basis());
        if exp > claimed_m_star_exp {
            violation = Some((sub.basis().row_vecs(), exp));
            break;
        }
    }
    Ok(SampleReport {
        claimed_m_star_exp,
        samples_drawn: drawn,
        seed,
        vacuous: samples == 0,
        violation: violation.clone(),
        pass: violation.is_none(),
    })
}

/// Builds the candidate atoms of a family form from the nonzero elements of
/// its matrix algebra: the two blocks plus every graph subspace, each
/// verified to attain the maximal measure. A graph failing the check is a
/// falsification candidate and turns into a hard error.
pub fn atom_graph_search(f: &AlternatingForm, algebra: &FieldAlgebra) -> Result<Vec<Subspace>> {
    let meta = f
        .meta()
        .ok_or_else(|| Error::InvalidParams("atom search needs family metadata".into()))?
        .clone();
    ensure_valid(f)?;
    let n = meta.n();
    let d = f.dim_v();
    meta.check_layout(d)?;
    let m_star = 2 * f.dim_w() as u64 + d as u64;
    if algebra.ambient_dim() != n {
        return Err(Error::Dimension(format!(
            "algebra acts on dimension {}, blocks have dimension {n}",
            algebra.ambient_dim()
        )));
    }

    let field = f.field();
    let x_block = block_subspace(field, d, 0, n);
    let y_block = block_subspace(field, d, n, 2 * n);
    let mut atoms = vec![x_block, y_block];
    for c in algebra.elements() {
        if c.is_zero() {
            continue;
        }
        // graph {(xi, C xi)}: basis rows (e_i | C e_i) = [I | C^T]
        let ct = c.transpose();
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut row = vec![0u32; d];
                row[i] = 1;
                row[n..d].copy_from_slice(ct.row(i));
                row
            })
            .collect();
        atoms.push(Subspace::from_rows(&FpMatrix::from_rows(field, &rows)?));
    }
    for atom in &atoms {
        let exp = f.measure_exponent_of_basis(atom.basis());
        if exp != m_star {
            return Err(Error::violation(
                "atom_graph_search",
                format!(
                    "candidate atom of dimension {} has measure exponent {exp}, expected {m_star}",
                    atom.dim()
                ),
            ));
        }
    }
    atoms.sort();
    Ok(atoms)
}

fn block_subspace(field: Fp, d: usize, from: usize, to: usize) -> Subspace {
    let rows: Vec<Vec<u32>> = (from..to)
        .map(|i| {
            let mut row = vec![0u32; d];
            row[i] = 1;
            row
        })
        .collect();
    Subspace::from_rows(&FpMatrix::from_rows(field, &rows).expect("block basis"))
}

/// Assertion-mode lattice result for a family form: bottom, top, and the
/// verified atom list. Completeness of the atom list is asserted, not
/// enumerated, and the result is flagged accordingly.
pub fn cd_assertion(f: &AlternatingForm, samples: Option<(u64, u64)>) -> Result<CdResult> {
    ensure_valid(f)?;
    let ranks = assertion_check(f)?;
    if !ranks.pass {
        return Err(Error::violation(
            "assertion_check",
            format!(
                "commutation ranks [{}, {}]x / [{}, {}]y break the family bound {}",
                ranks.min_rank_x, ranks.max_rank_x, ranks.min_rank_y, ranks.max_rank_y, ranks.bound
            ),
        ));
    }
    let algebra = crate::structure::family_block_algebra(f)?;
    let atoms = atom_graph_search(f, &algebra)?;
    let d = f.dim_v();
    let m_star = 2 * f.dim_w() as u64 + d as u64;
    let mut members = vec![
        Subspace::zero(f.field(), d),
        Subspace::full(f.field(), d),
    ];
    members.extend(atoms.iter().cloned());
    members.sort();

    let mut evidence = CdEvidence {
        atoms_verified: Some(atoms.len()),
        ..CdEvidence::default()
    };
    if let Some((n, seed)) = samples {
        let report = sample_check(f, m_star, n, seed)?;
        if let Some((basis, exp)) = &report.violation {
            return Err(Error::violation(
                "sample_check",
                format!(
                    "sampled subspace {basis:?} has measure exponent {exp} > claimed {m_star}"
                ),
            ));
        }
        evidence.samples = Some(report.samples_drawn);
        evidence.seed = Some(seed);
    }
    Ok(CdResult {
        m_star_exp: m_star,
        members,
        mode: CdMode::Assertion,
        evidence,
    })
}

// ---------------------------------------------------------------------------
// Report format and DOT export

/// Serialized lattice report; `p`/`d` and per-member isotropy ride along so
/// the Hasse export can work from this file alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CdReport {
    pub m_star_exp: u64,
    pub mode: CdMode,
    pub members: Vec<MemberEntry>,
    pub shape: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub p: u32,
    pub d: usize,
    pub evidence: CdEvidence,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberEntry {
    pub dim: usize,
    pub basis: Vec<Vec<u32>>,
    pub isotropic: bool,
}

impl CdReport {
    /// Reconstructs the in-memory result from a report file.
    pub fn to_result(&self) -> Result<CdResult> {
        let field = Fp::new(self.p)?;
        let members = self
            .members
            .iter()
            .map(|m| {
                Ok(Subspace::from_rows(&if m.basis.is_empty() {
                    FpMatrix::zeros(field, 0, self.d)
                } else {
                    FpMatrix::from_rows(field, &m.basis)?
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CdResult {
            m_star_exp: self.m_star_exp,
            members,
            mode: self.mode,
            evidence: self.evidence.clone(),
        })
    }

    pub fn build(res: &CdResult, class: Option<&PosetClass>, f: &AlternatingForm) -> CdReport {
        let members = res
            .members
            .iter()
            .map(|u| MemberEntry {
                dim: u.dim(),
                basis: u.basis().row_vecs(),
                isotropic: f.is_isotropic(u),
            })
            .collect();
        let shape = match class.map(|c| c.shape) {
            Some(Shape::Chain) => "chain",
            Some(Shape::Quasiantichain) => "quasiantichain",
            Some(Shape::Other) => "other",
            None => "unclassified",
        };
        CdReport {
            m_star_exp: res.m_star_exp,
            mode: res.mode,
            members,
            shape: shape.to_string(),
            w: class.and_then(|c| c.w),
            t: class.and_then(|c| c.t),
            seed: res.evidence.seed,
            p: f.field().modulus(),
            d: f.dim_v(),
            evidence: res.evidence.clone(),
        }
    }
}

/// Hasse diagram of the member poset in DOT, bottom-up, atoms annotated
/// abelian/nonabelian. The bottom member is Z(G), the top is G.
pub fn hasse_dot(report: &CdReport) -> Result<String> {
    let field = Fp::new(report.p)?;
    let subs: Vec<Subspace> = report
        .members
        .iter()
        .map(|m| {
            Ok(Subspace::from_rows(&if m.basis.is_empty() {
                FpMatrix::zeros(field, 0, report.d)
            } else {
                FpMatrix::from_rows(field, &m.basis)?
            }))
        })
        .collect::<Result<_>>()?;
    let k = subs.len();
    let less = |i: usize, j: usize| subs[i].dim() < subs[j].dim() && subs[j].contains(&subs[i]);

    let mut out = String::from("digraph cd_lattice {\n  rankdir=BT;\n  node [shape=box];\n");
    let min_dim = subs.iter().map(Subspace::dim).min().unwrap_or(0);
    let max_dim = subs.iter().map(Subspace::dim).max().unwrap_or(0);
    for (i, member) in report.members.iter().enumerate() {
        let label = if member.dim == min_dim && subs.iter().all(|u| u.contains(&subs[i])) {
            "Z(G)".to_string()
        } else if member.dim == max_dim && subs.iter().all(|u| subs[i].contains(u)) {
            "G".to_string()
        } else {
            format!(
                "dim {} ({})",
                member.dim,
                if member.isotropic { "abelian" } else { "nonabelian" }
            )
        };
        out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
    }
    for i in 0..k {
        for j in 0..k {
            if !less(i, j) {
                continue;
            }
            let covered = (0..k).any(|mid| less(i, mid) && less(mid, j));
            if !covered {
                out.push_str(&format!("  n{i} -> n{j};\n"));
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
