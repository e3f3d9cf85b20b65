//! Element-level realization of the group as a central extension of W by V,
//! used to cross-check the subspace computations against honest group
//! arithmetic.
//!
//! Multiplication is (v1, w1)(v2, w2) = (v1+v2, w1+w2+beta(v1, v2)) with the
//! 2-cocycle beta taken slice-wise from the strict upper triangle of the
//! form, so that beta(u, v) - beta(v, u) = b(u, v) exactly. Generators e_i
//! then satisfy beta(e_i, e_i) = 0, matching presentations where the
//! designated generators have order p (p odd) or square to the identity
//! (p = 2); other elements may have order p^2 when p = 2, which still keeps
//! G/Z(G) elementary abelian.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffalg::FpMatrix;
use crate::formspace::{AlternatingForm, Subspace};

/// Default cap on explicit element sets.
pub const ORACLE_CAPACITY: u64 = 1 << 20;

/// An element (v, w): v the image in G/Z(G), w the central coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub v: Vec<u32>,
    pub w: Vec<u32>,
}

/// The group attached to a form, with the fixed upper-triangular cocycle.
pub struct ExtensionGroup<'a> {
    form: &'a AlternatingForm,
    /// Strict upper triangles of the slices.
    beta: Vec<FpMatrix>,
}

impl<'a> ExtensionGroup<'a> {
    pub fn new(form: &'a AlternatingForm) -> ExtensionGroup<'a> {
        let d = form.dim_v();
        let beta = form
            .slices()
            .iter()
            .map(|s| {
                let mut ut = FpMatrix::zeros(form.field(), d, d);
                for i in 0..d {
                    for j in (i + 1)..d {
                        ut.set(i, j, s.get(i, j));
                    }
                }
                ut
            })
            .collect();
        ExtensionGroup { form, beta }
    }

    pub fn form(&self) -> &AlternatingForm {
        self.form
    }

    /// |G| = p^(d+m).
    pub fn order(&self) -> u128 {
        (self.form.field().modulus() as u128).pow((self.form.dim_v() + self.form.dim_w()) as u32)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            v: vec![0; self.form.dim_v()],
            w: vec![0; self.form.dim_w()],
        }
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut g = self.identity();
        g.v[i] = 1;
        g
    }

    pub fn central_generator(&self, s: usize) -> GroupElement {
        let mut g = self.identity();
        g.w[s] = 1;
        g
    }

    fn check_dims(&self, g: &GroupElement) -> Result<()> {
        if g.v.len() != self.form.dim_v() || g.w.len() != self.form.dim_w() {
            return Err(Error::Dimension(format!(
                "element has shape ({}, {}), group needs ({}, {})",
                g.v.len(),
                g.w.len(),
                self.form.dim_v(),
                self.form.dim_w()
            )));
        }
        Ok(())
    }

    fn cocycle(&self, u: &[u32], v: &[u32]) -> Vec<u32> {
        let p = self.form.field().modulus() as u64;
        self.beta
            .iter()
            .map(|ut| {
                let mut acc = 0u64;
                for (i, &ui) in u.iter().enumerate() {
                    if ui == 0 {
                        continue;
                    }
                    let row = ut.row(i);
                    let mut inner = 0u64;
                    for (j, &vj) in v.iter().enumerate() {
                        inner += row[j] as u64 * vj as u64;
                    }
                    acc += ui as u64 * (inner % p);
                }
                (acc % p) as u32
            })
            .collect()
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_dims(g)?;
        self.check_dims(h)?;
        let f = self.form.field();
        let v = g.v.iter().zip(&h.v).map(|(&a, &b)| f.add(a, b)).collect();
        let coc = self.cocycle(&g.v, &h.v);
        let w = g
            .w
            .iter()
            .zip(&h.w)
            .zip(coc)
            .map(|((&a, &b), c)| f.add(f.add(a, b), c))
            .collect();
        Ok(GroupElement { v, w })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check_dims(g)?;
        let f = self.form.field();
        let v: Vec<u32> = g.v.iter().map(|&a| f.neg(a)).collect();
        let self_coc = self.cocycle(&g.v, &g.v);
        let w = g
            .w
            .iter()
            .zip(self_coc)
            .map(|(&a, c)| f.sub(c, a))
            .collect();
        Ok(GroupElement { v, w })
    }

    /// g^k via the class-2 law g^k = (k v, k w + C(k,2) beta(v, v)).
    pub fn power(&self, g: &GroupElement, k: u64) -> Result<GroupElement> {
        self.check_dims(g)?;
        let f = self.form.field();
        let p = f.modulus() as u64;
        let k_mod = (k % p) as u32;
        // C(k, 2) mod p only depends on k mod 2p
        let r = k % (2 * p);
        let binom = f.reduce_u64(r * r.saturating_sub(1) / 2);
        let self_coc = self.cocycle(&g.v, &g.v);
        let v = g.v.iter().map(|&a| f.mul(a, k_mod)).collect();
        let w = g
            .w
            .iter()
            .zip(self_coc)
            .map(|(&a, c)| f.add(f.mul(a, k_mod), f.mul(c, binom)))
            .collect();
        Ok(GroupElement { v, w })
    }

    /// [g, h] = g h g^-1 h^-1, computed honestly from the group operations.
    pub fn commutator(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let gh = self.multiply(g, h)?;
        let gi = self.inverse(g)?;
        let hi = self.inverse(h)?;
        self.multiply(&self.multiply(&gh, &gi)?, &hi)
    }

    /// Mixed-radix index of an element; total order matches `decode`.
    pub fn encode(&self, g: &GroupElement) -> u64 {
        let p = self.form.field().modulus() as u64;
        let mut idx = 0u64;
        for &x in g.w.iter().rev() {
            idx = idx * p + x as u64;
        }
        for &x in g.v.iter().rev() {
            idx = idx * p + x as u64;
        }
        idx
    }

    pub fn decode(&self, mut idx: u64) -> GroupElement {
        let p = self.form.field().modulus() as u64;
        let mut g = self.identity();
        for i in 0..g.v.len() {
            g.v[i] = (idx % p) as u32;
            idx /= p;
        }
        for s in 0..g.w.len() {
            g.w[s] = (idx % p) as u32;
            idx /= p;
        }
        g
    }

    fn ensure_capacity(&self, cap: u64) -> Result<()> {
        if self.order() > cap as u128 {
            return Err(Error::Capacity {
                what: "group order".into(),
                estimated: self.order(),
                cap: cap as u128,
                hint: Some("the oracle only runs on explicit element sets".into()),
            });
        }
        Ok(())
    }
}

/// A subgroup held as an explicit, sorted element set.
#[derive(Debug, Clone)]
pub struct ElementSubgroup {
    pub generators: Vec<GroupElement>,
    /// Encoded elements, sorted ascending.
    pub elements: Vec<u64>,
    pub order: u64,
}

impl ElementSubgroup {
    pub fn contains_encoded(&self, idx: u64) -> bool {
        self.elements.binary_search(&idx).is_ok()
    }
}

/// Breadth-first closure of a generating set.
pub fn subgroup_closure(
    grp: &ExtensionGroup,
    gens: &[GroupElement],
    cap: u64,
) -> Result<ElementSubgroup> {
    grp.ensure_capacity(cap)?;
    for g in gens {
        grp.check_dims(g)?;
    }
    let total = grp.order() as usize;
    let mut seen = vec![false; total];
    let id = grp.identity();
    seen[grp.encode(&id) as usize] = true;
    let mut queue = vec![id];
    let mut count = 1u64;
    while let Some(g) = queue.pop() {
        for gen in gens {
            let next = grp.multiply(&g, gen)?;
            let idx = grp.encode(&next) as usize;
            if !seen[idx] {
                seen[idx] = true;
                count += 1;
                queue.push(next);
            }
        }
    }
    // Lagrange sanity: the order of a subgroup of a p-group is a p-power
    let p = grp.form().field().modulus() as u64;
    let mut q = count;
    while q.is_multiple_of(p) {
        q /= p;
    }
    if q != 1 {
        return Err(Error::Internal(format!(
            "closure order {count} is not a power of {p}"
        )));
    }
    let elements: Vec<u64> = seen
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| s.then_some(i as u64))
        .collect();
    Ok(ElementSubgroup {
        generators: gens.to_vec(),
        order: elements.len() as u64,
        elements,
    })
}

/// Centralizer of a subgroup by full element scan against its generator
/// set, with a seeded spot-check that generators suffice.
pub fn centralizer_elements(
    grp: &ExtensionGroup,
    h: &ElementSubgroup,
    cap: u64,
) -> Result<ElementSubgroup> {
    grp.ensure_capacity(cap)?;
    let id = grp.identity();
    let mut elements = Vec::new();
    let mut members = Vec::new();
    for idx in 0..grp.order() as u64 {
        let g = grp.decode(idx);
        let centralizes = h
            .generators
            .iter()
            .try_fold(true, |acc, gen| -> Result<bool> {
                Ok(acc && grp.commutator(&g, gen)? == id)
            })?;
        if centralizes {
            elements.push(idx);
            members.push(g);
        }
    }
    // generator-set sufficiency: re-check a random sample of H's elements
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    if !members.is_empty() && !h.elements.is_empty() {
        for _ in 0..100 {
            let g = &members[rng.random_range(0..members.len())];
            let h_elt = grp.decode(h.elements[rng.random_range(0..h.elements.len())]);
            if grp.commutator(g, &h_elt)? != id {
                return Err(Error::Internal(
                    "generator-set centralizer check failed on a full element".into(),
                ));
            }
        }
    }
    Ok(ElementSubgroup {
        generators: members,
        order: elements.len() as u64,
        elements,
    })
}

/// Element-level vs subspace-level measure comparison for one subspace.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureCrossCheck {
    pub subspace_dim: usize,
    pub subgroup_exp: u32,
    pub centralizer_exp: u32,
    pub element_measure_exp: u64,
    pub subspace_measure_exp: u64,
    pub agree: bool,
}

fn exact_p_log(p: u64, mut x: u64) -> Result<u32> {
    let mut e = 0u32;
    while x.is_multiple_of(p) {
        x /= p;
        e += 1;
    }
    if x != 1 {
        return Err(Error::Internal(format!("{x} leftover in p-log")));
    }
    Ok(e)
}

/// Builds the full preimage subgroup of U, measures it by element scan, and
/// compares with the subspace-level exponent. A mismatch is a hard error:
/// it means one of the two layers is wrong.
pub fn cross_check_measure(
    grp: &ExtensionGroup,
    u: &Subspace,
    cap: u64,
) -> Result<MeasureCrossCheck> {
    let form = grp.form();
    form.ensure_radical_zero()?;
    let p = form.field().modulus() as u64;
    let mut gens: Vec<GroupElement> = (0..u.dim())
        .map(|i| GroupElement {
            v: u.basis().row(i).to_vec(),
            w: vec![0; form.dim_w()],
        })
        .collect();
    gens.extend((0..form.dim_w()).map(|s| grp.central_generator(s)));
    let h = subgroup_closure(grp, &gens, cap)?;
    let expected_order = (p as u128).pow((form.dim_w() + u.dim()) as u32);
    if h.order as u128 != expected_order {
        return Err(Error::Internal(format!(
            "preimage subgroup has order {}, expected {expected_order}",
            h.order
        )));
    }
    let c = centralizer_elements(grp, &h, cap)?;
    let subgroup_exp = exact_p_log(p, h.order)?;
    let centralizer_exp = exact_p_log(p, c.order)?;
    let element_measure_exp = (subgroup_exp + centralizer_exp) as u64;
    let subspace_measure_exp = form.measure_exponent(u)?;
    let agree = element_measure_exp == subspace_measure_exp;
    if !agree {
        return Err(Error::violation(
            "cross_check_measure",
            format!(
                "element measure p^{element_measure_exp} vs subspace measure p^{subspace_measure_exp}"
            ),
        ));
    }
    Ok(MeasureCrossCheck {
        subspace_dim: u.dim(),
        subgroup_exp,
        centralizer_exp,
        element_measure_exp,
        subspace_measure_exp,
        agree,
    })
}

/// Draws random subgroups that do NOT contain the center and verifies none
/// of them beats the claimed maximal measure. Supports the convention that
/// the lattice search may restrict to subgroups containing Z(G).
#[derive(Debug, Clone, Serialize)]
pub struct NoncentralSampleReport {
    pub requested: u64,
    pub checked: u64,
    pub attempts: u64,
    pub seed: u64,
    pub max_exponent_seen: u64,
    pub violations: u64,
}

pub fn noncentral_subgroup_check(
    grp: &ExtensionGroup,
    count: u64,
    seed: u64,
    m_star_exp: u64,
    cap: u64,
) -> Result<NoncentralSampleReport> {
    grp.ensure_capacity(cap)?;
    let form = grp.form();
    let p = form.field().modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let central_gens: Vec<GroupElement> =
        (0..form.dim_w()).map(|s| grp.central_generator(s)).collect();
    let mut checked = 0u64;
    let mut attempts = 0u64;
    let mut max_seen = 0u64;
    let mut violations = 0u64;
    while checked < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(Error::Internal(
                "could not sample enough non-central subgroups".into(),
            ));
        }
        let k = rng.random_range(1..=3usize);
        let gens: Vec<GroupElement> = (0..k)
            .map(|_| GroupElement {
                v: (0..form.dim_v()).map(|_| rng.random_range(0..p)).collect(),
                w: (0..form.dim_w()).map(|_| rng.random_range(0..p)).collect(),
            })
            .collect();
        let h = subgroup_closure(grp, &gens, cap)?;
        let contains_center = central_gens
            .iter()
            .all(|z| h.contains_encoded(grp.encode(z)));
        if contains_center {
            continue;
        }
        let c = centralizer_elements(grp, &h, cap)?;
        let exp = (exact_p_log(p as u64, h.order)? + exact_p_log(p as u64, c.order)?) as u64;
        max_seen = max_seen.max(exp);
        if exp > m_star_exp {
            violations += 1;
        }
        checked += 1;
    }
    Ok(NoncentralSampleReport {
        requested: count,
        checked,
        attempts,
        seed,
        max_exponent_seen: max_seen,
        violations,
    })
}
