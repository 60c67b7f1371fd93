//! Finite PO systems and their Cantor-Bendixson calculus.
//!
//! A PO system is a finite set carrying a transitive antisymmetric relation
//! `<` in which self-loops `p < p` are permitted and meaningful: they mark
//! elements that behave like perfect (self-limiting) points. `P^d` denotes
//! the self-loop-free elements. The derivative deletes the maximal
//! self-loop-free elements; iterating it yields the kernel `K(P)`, the layer
//! decomposition, and the rank function, mirroring the Cantor-Bendixson
//! analysis of a Boolean space carved into pieces indexed by `P`.
//!
//! An [`ExtendedPoSystem`] `(P, L, f)` additionally distinguishes a lower
//! subset `L` (pieces with compact closure) and a size function `f` on the
//! minimal self-loop-free elements of `L` (the finite pieces). From such a
//! triple the invariants of any space assembled along `P` are predicted by
//! [`ExtendedPoSystem::predicted_invariants`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Validation errors for the relation of a PO system.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PoError {
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("unknown element {0:?} in relation")]
    UnknownElement(String),
    #[error("relation is not antisymmetric: {0:?} < {1:?} and {1:?} < {0:?}")]
    NotAntisymmetric(String, String),
    #[error("relation is not transitive: {0:?} < {1:?} < {2:?} but not {0:?} < {2:?}")]
    NotTransitive(String, String, String),
}

/// Validation errors for the `(L, f)` extension of a PO system.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtendError {
    #[error("unknown element {0:?} in extension")]
    UnknownElement(String),
    #[error("L is not a lower subset: {member:?} is in L but {below:?} <= {member:?} is not")]
    NotLower { member: String, below: String },
    #[error("f is missing a value for {0:?}, a minimal self-loop-free element of L")]
    MissingWeight(String),
    #[error("f assigns a value to {0:?}, which is not a minimal self-loop-free element of L")]
    SpuriousWeight(String),
    #[error("f must be positive, but f({0:?}) = 0")]
    ZeroWeight(String),
}

/// Finite set with a transitive antisymmetric relation; self-loops allowed.
#[derive(Clone, PartialEq, Eq)]
pub struct PoSystem {
    names: Vec<String>,
    idx: BTreeMap<String, usize>,
    lt: Vec<Vec<bool>>,
}

impl PoSystem {
    /// Builds a system from generating pairs: the relation is closed
    /// transitively, then checked for antisymmetry.
    pub fn new<S, T, U>(
        elements: impl IntoIterator<Item = S>,
        pairs: impl IntoIterator<Item = (T, U)>,
    ) -> Result<PoSystem, PoError>
    where
        S: Into<String>,
        T: AsRef<str>,
        U: AsRef<str>,
    {
        let mut sys = PoSystem::raw(elements, pairs)?;
        sys.close_transitively();
        sys.check_antisymmetric()?;
        Ok(sys)
    }

    /// Builds a system from an explicit relation, rejecting input that is
    /// not already transitively closed or not antisymmetric.
    pub fn from_closed_relation<S, T, U>(
        elements: impl IntoIterator<Item = S>,
        pairs: impl IntoIterator<Item = (T, U)>,
    ) -> Result<PoSystem, PoError>
    where
        S: Into<String>,
        T: AsRef<str>,
        U: AsRef<str>,
    {
        let sys = PoSystem::raw(elements, pairs)?;
        sys.check_transitive()?;
        sys.check_antisymmetric()?;
        Ok(sys)
    }

    fn raw<S, T, U>(
        elements: impl IntoIterator<Item = S>,
        pairs: impl IntoIterator<Item = (T, U)>,
    ) -> Result<PoSystem, PoError>
    where
        S: Into<String>,
        T: AsRef<str>,
        U: AsRef<str>,
    {
        let names: Vec<String> = elements.into_iter().map(Into::into).collect();
        let mut idx = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if idx.insert(name.clone(), i).is_some() {
                return Err(PoError::DuplicateElement(name.clone()));
            }
        }
        let mut lt = vec![vec![false; names.len()]; names.len()];
        for (p, q) in pairs {
            let find = |s: &str| {
                idx.get(s)
                    .copied()
                    .ok_or_else(|| PoError::UnknownElement(s.to_owned()))
            };
            lt[find(p.as_ref())?][find(q.as_ref())?] = true;
        }
        Ok(PoSystem { names, idx, lt })
    }

    fn close_transitively(&mut self) {
        let n = self.names.len();
        for k in 0..n {
            for i in 0..n {
                if self.lt[i][k] {
                    for j in 0..n {
                        if self.lt[k][j] {
                            self.lt[i][j] = true;
                        }
                    }
                }
            }
        }
    }

    fn check_antisymmetric(&self) -> Result<(), PoError> {
        for i in 0..self.names.len() {
            for j in 0..i {
                if self.lt[i][j] && self.lt[j][i] {
                    return Err(PoError::NotAntisymmetric(
                        self.names[j].clone(),
                        self.names[i].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_transitive(&self) -> Result<(), PoError> {
        let n = self.names.len();
        for i in 0..n {
            for j in 0..n {
                if self.lt[i][j] {
                    for k in 0..n {
                        if self.lt[j][k] && !self.lt[i][k] {
                            return Err(PoError::NotTransitive(
                                self.names[i].clone(),
                                self.names[j].clone(),
                                self.names[k].clone(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = &String> {
        self.names.iter()
    }

    pub fn contains(&self, p: &str) -> bool {
        self.idx.contains_key(p)
    }

    /// Strict relation `p < q`. Panics if either name is unknown.
    pub fn lt(&self, p: &str, q: &str) -> bool {
        self.lt[self.index(p)][self.index(q)]
    }

    /// `p <= q`, meaning `p < q` or `p = q`.
    pub fn le(&self, p: &str, q: &str) -> bool {
        p == q || self.lt(p, q)
    }

    fn index(&self, p: &str) -> usize {
        *self
            .idx
            .get(p)
            .unwrap_or_else(|| panic!("element {p:?} is not in the system"))
    }

    /// Self-loop-free elements `P^d`.
    pub fn d_part(&self) -> BTreeSet<String> {
        self.collect(|i| !self.lt[i][i])
    }

    /// Elements with no other element strictly above them.
    pub fn maximal(&self) -> BTreeSet<String> {
        self.collect(|i| self.is_maximal_in(i, &vec![true; self.len()]))
    }

    /// Elements with no other element strictly below them.
    pub fn minimal(&self) -> BTreeSet<String> {
        self.collect(|i| (0..self.len()).all(|j| j == i || !self.lt[j][i]))
    }

    fn collect(&self, keep: impl Fn(usize) -> bool) -> BTreeSet<String> {
        (0..self.len())
            .filter(|&i| keep(i))
            .map(|i| self.names[i].clone())
            .collect()
    }

    fn is_maximal_in(&self, i: usize, mask: &[bool]) -> bool {
        (0..self.len()).all(|j| j == i || !mask[j] || !self.lt[i][j])
    }

    fn mask_of(&self, q: &BTreeSet<String>) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for name in q {
            mask[self.index(name)] = true;
        }
        mask
    }

    fn set_of(&self, mask: &[bool]) -> BTreeSet<String> {
        (0..self.len())
            .filter(|&i| mask[i])
            .map(|i| self.names[i].clone())
            .collect()
    }

    /// Induced subsystem on the given subset.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> PoSystem {
        let mask = self.mask_of(keep);
        let names: Vec<String> = (0..self.len())
            .filter(|&i| mask[i])
            .map(|i| self.names[i].clone())
            .collect();
        let pairs: Vec<(String, String)> = names
            .iter()
            .flat_map(|p| {
                names
                    .iter()
                    .filter(|q| self.lt(p, q))
                    .map(|q| (p.clone(), q.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        PoSystem::from_closed_relation(names, pairs)
            .expect("induced relation inherits transitivity and antisymmetry")
    }

    /// One Cantor-Bendixson step: delete the maximal self-loop-free elements.
    pub fn derivative(&self) -> PoSystem {
        let full = vec![true; self.len()];
        let keep = self.collect(|i| self.lt[i][i] || !self.is_maximal_in(i, &full));
        self.restrict(&keep)
    }

    /// Masks of the full derivative chain `P = P^(0) ⊋ ... ⊋ P^(nu) = K(P)`,
    /// ending at the first repeated stage.
    fn derivative_masks(&self) -> Vec<Vec<bool>> {
        let mut chain = vec![vec![true; self.len()]];
        loop {
            let cur = chain.last().unwrap();
            let next: Vec<bool> = (0..self.len())
                .map(|i| cur[i] && (self.lt[i][i] || !self.is_maximal_in(i, cur)))
                .collect();
            if next == *cur {
                return chain;
            }
            chain.push(next);
        }
    }

    /// Full Cantor-Bendixson data of the system.
    pub fn invariants(&self) -> PoInvariants {
        let chain = self.derivative_masks();
        let nu = chain.len() - 1;
        let kernel_mask = chain.last().unwrap().clone();
        let layers: Vec<BTreeSet<String>> = (0..nu)
            .map(|xi| {
                self.set_of(
                    &(0..self.len())
                        .map(|i| chain[xi][i] && !chain[xi + 1][i])
                        .collect::<Vec<bool>>(),
                )
            })
            .collect();

        // down closure of P^(xi) - K within the whole of P
        let down_of_stage = |xi: usize| -> Vec<bool> {
            let stage = &chain[xi.min(nu)];
            let mut down = vec![false; self.len()];
            for j in 0..self.len() {
                if stage[j] && !kernel_mask[j] {
                    down[j] = true;
                    for (i, d) in down.iter_mut().enumerate() {
                        if self.lt[i][j] {
                            *d = true;
                        }
                    }
                }
            }
            down
        };

        let lambda = (0..=nu)
            .find(|&xi| {
                let outside = down_of_stage(xi)
                    .iter()
                    .enumerate()
                    .any(|(i, &d)| d && !(chain[xi][i] && !kernel_mask[i]));
                !outside
            })
            .expect("the empty stage is a lower subset");

        let mut rank = BTreeMap::new();
        for i in 0..self.len() {
            if kernel_mask[i] {
                let r = (0..=nu)
                    .find(|&xi| !down_of_stage(xi)[i])
                    .expect("the empty stage has an empty down closure");
                rank.insert(self.names[i].clone(), r);
            }
        }

        let p0: BTreeSet<String> = rank
            .iter()
            .filter(|(_, &r)| r == 0)
            .map(|(p, _)| p.clone())
            .collect();

        PoInvariants {
            nu,
            lambda,
            kernel: self.set_of(&kernel_mask),
            rank,
            layers,
            p0,
        }
    }

    /// Whether every layer is a singleton and at most one kernel element has
    /// rank 0.
    pub fn is_reduced(&self) -> bool {
        let inv = self.invariants();
        inv.layers.iter().all(|layer| layer.len() == 1) && inv.p0.len() <= 1
    }

    /// Collapses the system onto its reduction: the rank-positive kernel
    /// elements keep their identity, the rank-0 kernel elements merge into a
    /// single self-looped point, and each layer collapses to one point of a
    /// descending chain. Returns the reduction together with the quotient
    /// map, which is always a surjective morphism (see [`is_morphism`]).
    pub fn reduce(&self) -> (PoSystem, BTreeMap<String, String>) {
        let inv = self.invariants();
        let k0: Vec<String> = inv
            .kernel
            .iter()
            .filter(|p| inv.rank[*p] > 0)
            .cloned()
            .collect();

        let mut taken: BTreeSet<String> = k0.iter().cloned().collect();
        let fresh = |base: String, taken: &mut BTreeSet<String>| -> String {
            let mut name = base;
            while taken.contains(&name) {
                name.push('\'');
            }
            taken.insert(name.clone());
            name
        };
        let top = (!inv.p0.is_empty()).then(|| fresh("top".to_owned(), &mut taken));
        let chain_names: Vec<String> = (0..inv.nu)
            .map(|xi| fresh(xi.to_string(), &mut taken))
            .collect();

        let mut names: Vec<String> = k0.clone();
        names.extend(top.clone());
        names.extend(chain_names.iter().cloned());

        let mut pairs: Vec<(String, String)> = Vec::new();
        for p in &k0 {
            for q in &k0 {
                if self.lt(p, q) {
                    pairs.push((p.clone(), q.clone()));
                }
            }
            if let Some(top) = &top {
                if inv.p0.iter().any(|q| self.lt(p, q)) {
                    pairs.push((p.clone(), top.clone()));
                }
            }
            for (xi, xi_name) in chain_names.iter().enumerate() {
                if inv.rank[p] > xi {
                    pairs.push((p.clone(), xi_name.clone()));
                }
            }
        }
        if let Some(top) = &top {
            pairs.push((top.clone(), top.clone()));
        }
        for hi in 0..inv.nu {
            for lo in 0..hi {
                // the chain is reverse-ordered: deeper layers sit below
                pairs.push((chain_names[hi].clone(), chain_names[lo].clone()));
            }
        }

        let reduced = PoSystem::from_closed_relation(names, pairs)
            .expect("the reduction relation is transitive and antisymmetric");

        let mut map = BTreeMap::new();
        for p in &k0 {
            map.insert(p.clone(), p.clone());
        }
        for p in &inv.p0 {
            map.insert(p.clone(), top.clone().expect("p0 is nonempty"));
        }
        for (xi, layer) in inv.layers.iter().enumerate() {
            for p in layer {
                map.insert(p.clone(), chain_names[xi].clone());
            }
        }
        (reduced, map)
    }

    /// Report on a subset: whether it is lower or upper, and its closures.
    pub fn subset_report(&self, q: &BTreeSet<String>) -> SubsetReport {
        for name in q {
            assert!(self.contains(name), "element {name:?} is not in the system");
        }
        let down: BTreeSet<String> = self
            .names
            .iter()
            .filter(|p| q.iter().any(|s| self.le(p, s)))
            .cloned()
            .collect();
        let up: BTreeSet<String> = self
            .names
            .iter()
            .filter(|p| q.iter().any(|s| self.le(s, p)))
            .cloned()
            .collect();
        SubsetReport {
            is_lower: down.is_subset(q),
            is_upper: up.is_subset(q),
            down_closure: down,
            up_closure: up,
        }
    }

    /// Whether `f` is a finite foundation of `q`: `f ⊆ q↓` and every element
    /// of `q↓` lies above some element of `f`.
    pub fn is_finite_foundation(&self, q: &BTreeSet<String>, f: &BTreeSet<String>) -> bool {
        let down = self.subset_report(q).down_closure;
        f.is_subset(&down) && down.iter().all(|p| f.iter().any(|m| self.le(m, p)))
    }

    /// Whether `f` is a finite ceiling of `q`: `f ⊆ q` and every element of
    /// `q` lies below some element of `f`.
    pub fn is_finite_ceiling(&self, q: &BTreeSet<String>, f: &BTreeSet<String>) -> bool {
        f.is_subset(q) && q.iter().all(|p| f.iter().any(|m| self.le(p, m)))
    }

    /// Serializable form: elements in declaration order, relation pairs in
    /// lexicographic order.
    pub fn to_file(&self) -> PoFile {
        let mut lt: Vec<(String, String)> = Vec::new();
        for p in &self.names {
            for q in &self.names {
                if self.lt(p, q) {
                    lt.push((p.clone(), q.clone()));
                }
            }
        }
        lt.sort();
        PoFile {
            elements: self.names.clone(),
            lt,
            l: None,
            f: None,
        }
    }
}

impl fmt::Debug for PoSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PoSystem {{ ")?;
        for (i, p) in self.names.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, " | ")?;
        let mut first = true;
        for p in &self.names {
            for q in &self.names {
                if self.lt(p, q) {
                    if !first {
                        write!(f, ", ")?;
                    }
                    first = false;
                    write!(f, "{p}<{q}")?;
                }
            }
        }
        write!(f, " }}")
    }
}

/// Cantor-Bendixson data of a PO system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoInvariants {
    /// Number of derivative steps until the sequence stabilises.
    pub nu: usize,
    /// Least stage whose non-kernel remainder is a lower subset.
    pub lambda: usize,
    /// The stable part of the derivative sequence.
    pub kernel: BTreeSet<String>,
    /// Rank of each kernel element; order reversing, with maximum `lambda`.
    pub rank: BTreeMap<String, usize>,
    /// `layers[xi]` holds the elements deleted at step `xi`; they partition
    /// the complement of the kernel and each is nonempty.
    pub layers: Vec<BTreeSet<String>>,
    /// Kernel elements of rank 0.
    pub p0: BTreeSet<String>,
}

impl PoInvariants {
    /// Kernel elements of rank above `xi`.
    pub fn k_xi(&self, xi: usize) -> BTreeSet<String> {
        self.rank
            .iter()
            .filter(|(_, &r)| r > xi)
            .map(|(p, _)| p.clone())
            .collect()
    }
}

/// Independent recomputation of `nu`, `lambda` and the rank function from
/// the layer sets alone, using the layer-based closure formulas instead of
/// the stage-based ones. Exposed so agreement can be checked externally.
pub fn layer_formula_invariants(p: &PoSystem) -> (usize, usize, BTreeMap<String, usize>) {
    // layers computed directly as the maximal self-loop-free part of each stage
    let mut stage = p.clone();
    let mut layers: Vec<BTreeSet<String>> = Vec::new();
    let nu = loop {
        let max_d: BTreeSet<String> = stage
            .maximal()
            .intersection(&stage.d_part())
            .cloned()
            .collect();
        if max_d.is_empty() {
            break layers.len();
        }
        layers.push(max_d.clone());
        let keep: BTreeSet<String> = stage
            .elements()
            .filter(|e| !max_d.contains(*e))
            .cloned()
            .collect();
        stage = stage.restrict(&keep);
    };
    let kernel: BTreeSet<String> = stage.elements().cloned().collect();

    let layer_down = |xi: usize| -> BTreeSet<String> {
        match layers.get(xi) {
            Some(layer) => p.subset_report(layer).down_closure,
            None => BTreeSet::new(),
        }
    };
    let lambda = (0..=nu)
        .find(|&xi| layer_down(xi).intersection(&kernel).next().is_none())
        .expect("the empty layer meets nothing");
    let mut rank = BTreeMap::new();
    for q in &kernel {
        let r = (0..=nu)
            .find(|&xi| !layer_down(xi).contains(q))
            .expect("the empty layer has an empty down closure");
        rank.insert(q.clone(), r);
    }
    (nu, lambda, rank)
}

/// Whether `alpha` is a morphism from `q` to `p`: at every point the image
/// of the strictly-above set equals the strictly-above set of the image.
/// A map that is not total on `q` or maps outside `p` is not a morphism.
pub fn is_morphism(alpha: &BTreeMap<String, String>, q: &PoSystem, p: &PoSystem) -> bool {
    if !q.elements().all(|e| alpha.contains_key(e))
        || !alpha.values().all(|v| p.contains(v))
    {
        return false;
    }
    q.elements().all(|e| {
        let image_of_above: BTreeSet<&String> = q
            .elements()
            .filter(|r| q.lt(e, r))
            .map(|r| &alpha[r])
            .collect();
        let above_image: BTreeSet<&String> = p
            .elements()
            .filter(|r| p.lt(&alpha[e], r))
            .collect();
        image_of_above == above_image
    })
}

/// Subset classification within a PO system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetReport {
    pub is_lower: bool,
    pub is_upper: bool,
    pub down_closure: BTreeSet<String>,
    pub up_closure: BTreeSet<String>,
}

/// PO system together with a lower subset `L` and positive weights on the
/// minimal self-loop-free elements of `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedPoSystem {
    base: PoSystem,
    l: BTreeSet<String>,
    f: BTreeMap<String, u64>,
}

impl ExtendedPoSystem {
    pub fn new(
        base: PoSystem,
        l: BTreeSet<String>,
        f: BTreeMap<String, u64>,
    ) -> Result<ExtendedPoSystem, ExtendError> {
        for name in l.iter().chain(f.keys()) {
            if !base.contains(name) {
                return Err(ExtendError::UnknownElement(name.clone()));
            }
        }
        for q in &l {
            for p in base.elements() {
                if base.le(p, q) && !l.contains(p) {
                    return Err(ExtendError::NotLower {
                        member: q.clone(),
                        below: p.clone(),
                    });
                }
            }
        }
        let domain = ExtendedPoSystem::weight_domain(&base, &l);
        for p in &domain {
            match f.get(p) {
                None => return Err(ExtendError::MissingWeight(p.clone())),
                Some(0) => return Err(ExtendError::ZeroWeight(p.clone())),
                Some(_) => {}
            }
        }
        if let Some(p) = f.keys().find(|p| !domain.contains(*p)) {
            return Err(ExtendError::SpuriousWeight(p.clone()));
        }
        Ok(ExtendedPoSystem { base, l, f })
    }

    /// Minimal elements of `L` that carry no self-loop: the required domain
    /// of the weight function.
    fn weight_domain(base: &PoSystem, l: &BTreeSet<String>) -> BTreeSet<String> {
        let d = base.d_part();
        l.iter()
            .filter(|p| d.contains(*p) && !l.iter().any(|q| q != *p && base.lt(q, p)))
            .cloned()
            .collect()
    }

    pub fn base(&self) -> &PoSystem {
        &self.base
    }

    pub fn l(&self) -> &BTreeSet<String> {
        &self.l
    }

    pub fn f(&self) -> &BTreeMap<String, u64> {
        &self.f
    }

    /// Invariants of any space assembled along this extended system.
    ///
    /// `nu` and `lambda` always transfer. The top-layer count `n` is the sum
    /// of the weights over the last layer when that layer sits inside `L`
    /// and `nu` exceeds `lambda`; otherwise the space has no finite top
    /// layer and `n` is reported as `None` (minus infinity). The compact
    /// rank `rho` and the range for the uniform compact rank are only
    /// determined over a reduced base; over an unreduced base they are
    /// reported as `None`.
    pub fn predicted_invariants(&self) -> PredictedTuple {
        let inv = self.base.invariants();
        let n = match inv.nu.checked_sub(1) {
            Some(mu) if inv.nu > inv.lambda && inv.layers[mu].is_subset(&self.l) => {
                Some(
                    inv.layers[mu]
                        .iter()
                        .map(|p| {
                            self.f.get(p).copied().expect(
                                "a last layer inside L lies in the weight domain",
                            )
                        })
                        .sum(),
                )
            }
            _ => None,
        };

        let (rho, rho_u_range, rho_u_excluded) = if self.base.is_reduced() {
            let layer_inside = |xi: usize| match inv.layers.get(xi) {
                Some(layer) => layer.is_subset(&self.l),
                None => true,
            };
            let rho = (0..=inv.nu)
                .find(|&xi| layer_inside(xi))
                .expect("the empty layer is inside L");
            let lo = (0..=inv.nu)
                .find(|&xi| inv.k_xi(xi).is_subset(&self.l))
                .expect("the empty kernel slice is inside L");
            let excluded = (lo.max(1)..=rho)
                .filter(|&xi| {
                    let slice: BTreeSet<String> = inv
                        .rank
                        .iter()
                        .filter(|(_, &r)| r == xi)
                        .map(|(p, _)| p.clone())
                        .collect();
                    slice.is_subset(&self.l)
                })
                .collect();
            (Some(rho), Some((lo, rho)), excluded)
        } else {
            (None, None, Vec::new())
        };

        PredictedTuple {
            nu: inv.nu,
            lambda: inv.lambda,
            n,
            rho,
            rho_u_range,
            rho_u_excluded,
        }
    }

    pub fn to_file(&self) -> PoFile {
        let mut file = self.base.to_file();
        file.l = Some(self.l.iter().cloned().collect());
        file.f = Some(self.f.clone());
        file
    }
}

/// Space invariants predicted from an extended PO system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedTuple {
    pub nu: usize,
    pub lambda: usize,
    /// `None` encodes minus infinity (no finite top layer).
    pub n: Option<u64>,
    /// Compact rank; `None` when the base is not reduced.
    pub rho: Option<usize>,
    /// Closed interval of possible uniform compact ranks; `None` when the
    /// base is not reduced. The true value is never determined by the
    /// system alone, only bounded.
    pub rho_u_range: Option<(usize, usize)>,
    /// Values inside the range that are nevertheless impossible: successor
    /// stages whose rank slice lies wholly inside `L`.
    pub rho_u_excluded: Vec<usize>,
}

/// On-disk JSON form of a plain or extended PO system. The `lt` pairs need
/// not be transitively closed; loading closes them. `L` and `f` are present
/// only for extended systems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoFile {
    pub elements: Vec<String>,
    pub lt: Vec<(String, String)>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<BTreeMap<String, u64>>,
}

/// A loaded PO-system file: plain, or extended when `L`/`f` appear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedPo {
    Plain(PoSystem),
    Extended(ExtendedPoSystem),
}

impl LoadedPo {
    pub fn base(&self) -> &PoSystem {
        match self {
            LoadedPo::Plain(p) => p,
            LoadedPo::Extended(e) => e.base(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PoLoadError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Relation(#[from] PoError),
    #[error(transparent)]
    Extension(#[from] ExtendError),
}

/// Parses the JSON file format, closing the relation transitively.
pub fn load_po_json(text: &str) -> Result<LoadedPo, PoLoadError> {
    let file: PoFile = serde_json::from_str(text)?;
    let base = PoSystem::new(file.elements, file.lt)?;
    match (file.l, file.f) {
        (None, None) => Ok(LoadedPo::Plain(base)),
        (l, f) => {
            let l = l.unwrap_or_default().into_iter().collect();
            let f = f.unwrap_or_default();
            Ok(LoadedPo::Extended(ExtendedPoSystem::new(base, l, f)?))
        }
    }
}

/// Descending chain of `nu` self-loop-free elements named `"0" .. "nu-1"`,
/// where `"0"` is the top: the shape every scattered reduction takes.
pub fn chain_system(nu: usize) -> PoSystem {
    let names: Vec<String> = (0..nu).map(|i| i.to_string()).collect();
    let mut pairs = Vec::new();
    for hi in 0..nu {
        for lo in 0..hi {
            pairs.push((names[hi].clone(), names[lo].clone()));
        }
    }
    PoSystem::from_closed_relation(names, pairs).expect("a chain is a valid order")
}

/// Random valid PO system with up to `max_size` elements: a random DAG
/// oriented along the element order, transitively closed, with independent
/// self-loop bits.
pub fn random_po_system<R: rand::Rng + ?Sized>(rng: &mut R, max_size: usize) -> PoSystem {
    let n = rng.gen_range(0..=max_size);
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut pairs: Vec<(String, String)> = Vec::new();
    for i in 0..n {
        for j in 0..i {
            // orient strictly from higher to lower index: acyclic by construction
            if rng.gen_bool(0.3) {
                pairs.push((names[i].clone(), names[j].clone()));
            }
        }
        if rng.gen_bool(0.25) {
            pairs.push((names[i].clone(), names[i].clone()));
        }
    }
    PoSystem::new(names, pairs).expect("an oriented DAG closes to a valid system")
}

/// Random valid extended PO system: a random system with a random lower
/// subset and weights 1..=4 on the forced domain.
pub fn random_extended_po_system<R: rand::Rng + ?Sized>(
    rng: &mut R,
    max_size: usize,
) -> ExtendedPoSystem {
    let base = random_po_system(rng, max_size);
    let seed: BTreeSet<String> = base
        .elements()
        .filter(|_| rng.gen_bool(0.4))
        .cloned()
        .collect();
    let l = base.subset_report(&seed).down_closure;
    let f = ExtendedPoSystem::weight_domain(&base, &l)
        .into_iter()
        .map(|p| (p, rng.gen_range(1..=4)))
        .collect();
    ExtendedPoSystem::new(base, l, f).expect("a downward closure extends validly")
}
