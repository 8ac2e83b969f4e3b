//! Finite posets, their order automorphisms, and the stage groups of a
//! product poset.
//!
//! For a product `P x Q` the left stage group consists of automorphisms that
//! preserve the `Q` coordinate, the right stage group of those preserving the
//! `P` coordinate. The lab checks whether these generate the coordinate flip
//! of `P x P`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::group::{Perm, PermGroup};

/// Largest poset (including products) whose automorphism group is
/// computed; every group on this many points has order below `u64::MAX`.
pub const MAX_POSET_SIZE: usize = 20;

/// Largest automorphism group that [`automorphisms`] lists element by
/// element.
pub const MAX_LISTED_AUTOMORPHISMS: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("poset has {size} elements, limit is {limit}")]
    InstanceTooLarge { size: usize, limit: usize },
    #[error("automorphism group has {order} elements, listing limit is {limit}")]
    TooManyAutomorphisms { order: u64, limit: u64 },
    #[error("relation is not antisymmetric: {0} < {1} and {1} < {0}")]
    NotAntisymmetric(usize, usize),
    #[error("element {element} is outside 0..{size}")]
    OutOfRange { element: usize, size: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A finite partial order on `0..size`, stored as a full `leq` matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    size: usize,
    leq: Vec<bool>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinitePoset({}; {:?})", self.size, self.strict_pairs())
    }
}

impl FinitePoset {
    /// Builds the reflexive transitive closure of `pairs` (read as `a < b`)
    /// and checks antisymmetry.
    pub fn from_relations(size: usize, pairs: &[(usize, usize)]) -> Result<Self, PosetError> {
        let mut leq = vec![false; size * size];
        for i in 0..size {
            leq[i * size + i] = true;
        }
        for &(a, b) in pairs {
            if let Some(&element) = [a, b].iter().find(|&&x| x >= size) {
                return Err(PosetError::OutOfRange { element, size });
            }
            leq[a * size + b] = true;
        }
        for k in 0..size {
            for i in 0..size {
                if leq[i * size + k] {
                    for j in 0..size {
                        if leq[k * size + j] {
                            leq[i * size + j] = true;
                        }
                    }
                }
            }
        }
        for a in 0..size {
            for b in a + 1..size {
                if leq[a * size + b] && leq[b * size + a] {
                    return Err(PosetError::NotAntisymmetric(a, b));
                }
            }
        }
        Ok(Self { size, leq })
    }

    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_relations(n, &pairs).expect("a chain is a partial order")
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_relations(n, &[]).expect("an antichain is a partial order")
    }

    /// `{0,1}^2` under cellwise comparison, elements indexed `00, 01, 10, 11`.
    pub fn diamond() -> Self {
        Self::product(&Self::chain(2), &Self::chain(2))
    }

    /// Componentwise order on `P x Q`; `(x, y)` has index `x * |Q| + y`.
    pub fn product(p: &Self, q: &Self) -> Self {
        let size = p.size * q.size;
        let mut leq = vec![false; size * size];
        for i in 0..size {
            for j in 0..size {
                let (x1, y1) = (i / q.size, i % q.size);
                let (x2, y2) = (j / q.size, j % q.size);
                leq[i * size + j] = p.leq(x1, x2) && q.leq(y1, y2);
            }
        }
        Self { size, leq }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.size + b]
    }

    /// All pairs `a < b`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.size)
            .flat_map(|a| (0..self.size).map(move |b| (a, b)))
            .filter(|&(a, b)| a != b && self.leq(a, b))
            .collect()
    }

    /// True when no two distinct elements are comparable.
    pub fn is_trivial(&self) -> bool {
        self.strict_pairs().is_empty()
    }

    /// Whether `perm` is an order automorphism.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        let n = self.size;
        perm.len() == n
            && is_bijection(perm)
            && (0..n).all(|a| (0..n).all(|b| self.leq(a, b) == self.leq(perm[a], perm[b])))
    }

    /// (elements below, elements above): preserved by every automorphism.
    fn signature(&self, x: usize) -> (usize, usize) {
        let below = (0..self.size).filter(|&y| self.leq(y, x)).count();
        let above = (0..self.size).filter(|&y| self.leq(x, y)).count();
        (below, above)
    }

    /// The poset with elements relabelled by `perm` (element `x` becomes
    /// `perm[x]`).
    fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.size;
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[perm[a] * n + perm[b]] = self.leq(a, b);
            }
        }
        Self { size: n, leq }
    }
}

fn is_bijection(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&x| x < perm.len() && !std::mem::replace(&mut seen[x], true))
}

/// Text form: the size on the first line, then one `a < b` per line.
/// Blank lines and lines starting with `#` are ignored.
impl FromStr for FinitePoset {
    type Err = PosetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines =
            s.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line, message: &str| PosetError::Parse { line, message: message.to_string() };
        let (line, first) = lines.next().ok_or_else(|| parse_err(1, "missing element count"))?;
        let size: usize = first.parse().map_err(|_| parse_err(line, "expected the element count"))?;
        let mut pairs = Vec::new();
        for (line, text) in lines {
            let (a, b) = text.split_once('<').ok_or_else(|| parse_err(line, "expected `a < b`"))?;
            let a = a.trim().parse().map_err(|_| parse_err(line, "expected an element index"))?;
            let b = b.trim().parse().map_err(|_| parse_err(line, "expected an element index"))?;
            pairs.push((a, b));
        }
        Self::from_relations(size, &pairs)
    }
}

impl fmt::Display for FinitePoset {
    /// Writes the covering relation in the text form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.size)?;
        let strict = self.strict_pairs();
        for &(a, b) in &strict {
            let covered = !(0..self.size).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
            if covered {
                writeln!(f, "{a} < {b}")?;
            }
        }
        Ok(())
    }
}

/// An order automorphism, `perm[x]` being the image of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MonotoneBijection {
    pub perm: Vec<usize>,
}

impl MonotoneBijection {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { perm: other.perm.iter().map(|&x| self.perm[x]).collect() }
    }

    pub fn invert(&self) -> Self {
        let mut perm = vec![0; self.perm.len()];
        for (x, &y) in self.perm.iter().enumerate() {
            perm[y] = x;
        }
        Self { perm }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &x)| i == x)
    }
}

/// Order and generators of `Aut(p)`, without listing its elements.
pub fn automorphism_group(p: &FinitePoset) -> Result<PermGroup, PosetError> {
    restricted_automorphisms(p, |_, _| true)
}

/// All order automorphisms of `p` in lexicographic order of their tables.
pub fn automorphisms(p: &FinitePoset) -> Result<Vec<MonotoneBijection>, PosetError> {
    let group = automorphism_group(p)?;
    let order = group.order() as u64;
    if order > MAX_LISTED_AUTOMORPHISMS {
        return Err(PosetError::TooManyAutomorphisms { order, limit: MAX_LISTED_AUTOMORPHISMS });
    }
    Ok(group.elements().into_iter().map(|perm| MonotoneBijection { perm }).collect())
}

/// The automorphisms `g` of `p` with `allowed(x, g(x))` for every `x`,
/// which must form a subgroup.
///
/// For each base point `i` (all earlier points fixed) one automorphism is
/// searched per image of `i` not already reached by the generators found
/// so far; the result is a strong generating set.
fn restricted_automorphisms(p: &FinitePoset, allowed: impl Fn(usize, usize) -> bool) -> Result<PermGroup, PosetError> {
    if p.size > MAX_POSET_SIZE {
        return Err(PosetError::InstanceTooLarge { size: p.size, limit: MAX_POSET_SIZE });
    }
    let n = p.size;
    let sig: Vec<_> = (0..n).map(|x| p.signature(x)).collect();
    let mut gens: Vec<Perm> = Vec::new();
    for i in (0..n).rev() {
        let mut reached = orbit(n, i, &gens);
        for y in i + 1..n {
            if reached[y] || sig[y] != sig[i] || !allowed(i, y) {
                continue;
            }
            let mut perm: Perm = (0..n).collect();
            let mut used = vec![false; n];
            used[..i].iter_mut().for_each(|u| *u = true);
            perm[i] = y;
            used[y] = true;
            let fits = (0..i).all(|z| p.leq(z, i) == p.leq(z, y) && p.leq(i, z) == p.leq(y, z));
            if fits && extend(p, &sig, &allowed, i + 1, &mut perm, &mut used) {
                debug_assert!(p.is_automorphism(&perm));
                gens.push(perm);
                reached = orbit(n, i, &gens);
            }
        }
    }
    Ok(PermGroup::new(n, &gens))
}

fn orbit(n: usize, start: usize, gens: &[Perm]) -> Vec<bool> {
    let mut reached = vec![false; n];
    reached[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for g in gens {
            if !std::mem::replace(&mut reached[g[x]], true) {
                stack.push(g[x]);
            }
        }
    }
    reached
}

/// Depth-first completion of a partial automorphism defined on `0..x`.
fn extend(
    p: &FinitePoset,
    sig: &[(usize, usize)],
    allowed: &impl Fn(usize, usize) -> bool,
    x: usize,
    perm: &mut [usize],
    used: &mut [bool],
) -> bool {
    let n = p.size;
    if x == n {
        return true;
    }
    for y in 0..n {
        if used[y] || sig[y] != sig[x] || !allowed(x, y) {
            continue;
        }
        let consistent = (0..x).all(|z| p.leq(z, x) == p.leq(perm[z], y) && p.leq(x, z) == p.leq(y, perm[z]));
        if !consistent {
            continue;
        }
        perm[x] = y;
        used[y] = true;
        if extend(p, sig, allowed, x + 1, perm, used) {
            return true;
        }
        used[y] = false;
    }
    false
}

/// Stage groups of `P x Q` as subgroups of `Aut(P x Q)`.
#[derive(Debug, Clone)]
pub struct StageGroups {
    pub ambient: PermGroup,
    /// Automorphisms preserving the `Q` coordinate.
    pub left: PermGroup,
    /// Automorphisms preserving the `P` coordinate.
    pub right: PermGroup,
    /// `(x, y) ↦ (g(x), y)` for `g ∈ Aut(P)`.
    pub left_pure: PermGroup,
    /// `(x, y) ↦ (x, h(y))` for `h ∈ Aut(Q)`.
    pub right_pure: PermGroup,
}

pub fn stage_groups(p: &FinitePoset, q: &FinitePoset) -> Result<StageGroups, PosetError> {
    let prod = FinitePoset::product(p, q);
    let qs = q.size;
    let ambient = automorphism_group(&prod)?;
    let left = restricted_automorphisms(&prod, |i, j| i % qs == j % qs)?;
    let right = restricted_automorphisms(&prod, |i, j| i / qs == j / qs)?;
    let lift_left: Vec<Perm> = automorphism_group(p)?
        .generators()
        .iter()
        .map(|g| (0..prod.size).map(|i| g[i / qs] * qs + i % qs).collect())
        .collect();
    let lift_right: Vec<Perm> = automorphism_group(q)?
        .generators()
        .iter()
        .map(|h| (0..prod.size).map(|i| (i / qs) * qs + h[i % qs]).collect())
        .collect();
    Ok(StageGroups {
        left_pure: PermGroup::new(prod.size, &lift_left),
        right_pure: PermGroup::new(prod.size, &lift_right),
        ambient,
        left,
        right,
    })
}

/// The coordinate swap `(x, y) ↦ (y, x)` on `P x P`.
pub fn flip(size: usize) -> MonotoneBijection {
    MonotoneBijection { perm: (0..size * size).map(|i| (i % size) * size + i / size).collect() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlipReport {
    pub flip_in_closure: bool,
    /// Order of the subgroup generated by the two stage groups.
    pub closure_size: u64,
    pub aut_size: u64,
}

fn flip_from_groups(size: usize, groups: &StageGroups) -> FlipReport {
    let gens: Vec<Perm> = groups.left.generators().iter().chain(groups.right.generators()).cloned().collect();
    let closure = PermGroup::new(size * size, &gens);
    FlipReport {
        flip_in_closure: closure.contains(&flip(size).perm),
        closure_size: closure.order() as u64,
        aut_size: groups.ambient.order() as u64,
    }
}

/// Whether the left and right stage groups of `P x P` generate the flip.
pub fn flip_generated(p: &FinitePoset) -> Result<FlipReport, PosetError> {
    Ok(flip_from_groups(p.size, &stage_groups(p, p)?))
}

/// Everything the lab computes for one poset, for reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetReport {
    pub size: usize,
    pub relations: Vec<(usize, usize)>,
    pub trivial: bool,
    pub automorphisms: u64,
    pub product_automorphisms: u64,
    pub left: u64,
    pub right: u64,
    pub left_pure: u64,
    pub right_pure: u64,
    pub left_is_pure: bool,
    pub right_is_pure: bool,
    pub flip: FlipReport,
}

pub fn poset_report(p: &FinitePoset) -> Result<PosetReport, PosetError> {
    let groups = stage_groups(p, p)?;
    let order = |g: &PermGroup| g.order() as u64;
    Ok(PosetReport {
        size: p.size,
        relations: p.strict_pairs(),
        trivial: p.is_trivial(),
        automorphisms: order(&automorphism_group(p)?),
        product_automorphisms: order(&groups.ambient),
        left: order(&groups.left),
        right: order(&groups.right),
        left_pure: order(&groups.left_pure),
        right_pure: order(&groups.right_pure),
        // The pure groups are always contained in the stage groups.
        left_is_pure: groups.left.is_subgroup_of(&groups.left_pure),
        right_is_pure: groups.right.is_subgroup_of(&groups.right_pure),
        flip: flip_from_groups(p.size, &groups),
    })
}

/// One representative per isomorphism class of posets on `n` points,
/// obtained by filtering all relations and keeping the lexicographically
/// smallest relabelling.
pub fn posets_up_to_iso(n: usize) -> Vec<FinitePoset> {
    let off_diagonal: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let relabellings = all_perms(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << off_diagonal.len() {
        let pairs: Vec<_> =
            off_diagonal.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        let Ok(p) = FinitePoset::from_relations(n, &pairs) else { continue };
        // Only relations that were already transitively closed are kept.
        if p.strict_pairs().len() != pairs.len() {
            continue;
        }
        let canonical = relabellings.iter().map(|r| p.relabel(r).leq).min().expect("at least one relabelling");
        if seen.insert(canonical) {
            out.push(p);
        }
    }
    out
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// One row of the dichotomy sweep: the flip is generated exactly when the
/// poset is trivial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DichotomyCase {
    pub size: usize,
    pub relations: Vec<(usize, usize)>,
    pub trivial: bool,
    pub flip_in_closure: bool,
}

impl DichotomyCase {
    pub fn holds(&self) -> bool {
        self.trivial == self.flip_in_closure
    }
}

/// Checks the dichotomy on every poset of size `1..=max_size` up to
/// isomorphism.
pub fn dichotomy_sweep(max_size: usize) -> Result<Vec<DichotomyCase>, PosetError> {
    let mut cases = Vec::new();
    for n in 1..=max_size {
        for p in posets_up_to_iso(n) {
            let report = flip_generated(&p)?;
            cases.push(DichotomyCase {
                size: n,
                relations: p.strict_pairs(),
                trivial: p.is_trivial(),
                flip_in_closure: report.flip_in_closure,
            });
        }
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::group::compose;

    fn is_group(n: usize, g: &[MonotoneBijection]) -> bool {
        let set: HashSet<_> = g.iter().cloned().collect();
        set.contains(&MonotoneBijection::identity(n))
            && g.iter().all(|a| set.contains(&a.invert()) && g.iter().all(|b| set.contains(&a.compose(b))))
    }

    #[test]
    fn constructions() {
        assert_eq!(FinitePoset::chain(1).size(), 1);
        let d = FinitePoset::diamond();
        assert_eq!(d.size(), 4);
        assert!(d.leq(0, 3) && !d.leq(1, 2) && !d.leq(2, 1));
        assert_eq!(d.strict_pairs(), vec![(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]);
        assert!(FinitePoset::antichain(3).is_trivial());
    }

    #[test]
    fn automorphism_counts() {
        for n in 1..=5 {
            assert_eq!(automorphisms(&FinitePoset::chain(n)).unwrap(), vec![MonotoneBijection::identity(n)]);
        }
        let d = automorphisms(&FinitePoset::diamond()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[1].perm, vec![0, 2, 1, 3]);
        let d = FinitePoset::diamond();
        let dd = FinitePoset::product(&d, &d);
        let auts = automorphisms(&dd).unwrap();
        assert_eq!(auts.len(), 24);
        assert!(is_group(16, &auts));
        assert!(auts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(automorphisms(&FinitePoset::antichain(4)).unwrap().len(), 24);
    }

    #[test]
    fn boolean_lattice_automorphisms_match_brute_force() {
        // Aut({0,1}^k) is the coordinate permutations: k! of them.
        let c2 = FinitePoset::chain(2);
        let b3 = FinitePoset::product(&FinitePoset::product(&c2, &c2), &c2);
        let auts = automorphisms(&b3).unwrap();
        let brute: Vec<_> = all_perms(8)
            .into_iter()
            .filter(|p| b3.is_automorphism(p))
            .map(|perm| MonotoneBijection { perm })
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(auts, brute);
        assert_eq!(auts.len(), 6);
    }

    #[test]
    fn automorphisms_match_brute_force_up_to_five() {
        for n in 1..=5 {
            for p in posets_up_to_iso(n) {
                let brute: Vec<_> = all_perms(n)
                    .into_iter()
                    .filter(|perm| p.is_automorphism(perm))
                    .map(|perm| MonotoneBijection { perm })
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
                assert_eq!(automorphisms(&p).unwrap(), brute, "{p:?}");
            }
        }
    }

    #[test]
    fn large_groups_are_counted_not_listed() {
        let a4 = FinitePoset::antichain(4);
        let g = stage_groups(&a4, &a4).unwrap();
        assert_eq!(g.ambient.order(), (1..=16).product::<u128>());
        assert_eq!(g.left.order(), 24u128.pow(4));
        assert_eq!(g.left_pure.order(), 24);
        assert!(matches!(
            automorphisms(&FinitePoset::product(&a4, &a4)),
            Err(PosetError::TooManyAutomorphisms { limit: MAX_LISTED_AUTOMORPHISMS, .. })
        ));
        assert!(flip_generated(&a4).unwrap().flip_in_closure);
    }

    #[test]
    fn too_large() {
        assert!(matches!(
            automorphism_group(&FinitePoset::chain(21)),
            Err(PosetError::InstanceTooLarge { size: 21, limit: 20 })
        ));
        assert!(flip_generated(&FinitePoset::chain(5)).is_err());
        assert!(poset_report(&FinitePoset::antichain(5)).is_err());
    }

    #[test]
    fn stage_groups_of_products() {
        for n in 1..=4 {
            let c = FinitePoset::chain(n);
            let g = stage_groups(&c, &c).unwrap();
            assert_eq!(g.left.order(), 1);
            assert_eq!(g.ambient.order(), if n == 1 { 1 } else { 2 });
        }
        let d = FinitePoset::diamond();
        let g = stage_groups(&d, &d).unwrap();
        assert_eq!(g.left.order(), g.left_pure.order());
        assert!(g.left.is_subgroup_of(&g.left_pure) && g.right.is_subgroup_of(&g.right_pure));
        for a in g.left_pure.elements() {
            for b in g.right_pure.elements() {
                assert_eq!(compose(&a, &b), compose(&b, &a));
            }
        }
        // Every generator found really is an automorphism of the product
        // and stays in its fibre.
        let a2 = FinitePoset::antichain(2);
        let c3 = FinitePoset::chain(3);
        let prod = FinitePoset::product(&a2, &c3);
        let g = stage_groups(&a2, &c3).unwrap();
        assert!(g.left_pure.is_subgroup_of(&g.left) && g.right_pure.is_subgroup_of(&g.right));
        assert!(g.left.is_subgroup_of(&g.ambient) && g.right.is_subgroup_of(&g.ambient));
        for h in g.left.elements() {
            assert!(prod.is_automorphism(&h));
            assert!(h.iter().enumerate().all(|(i, &j)| i % 3 == j % 3));
        }
        // Two independent fibres of a2 x c3 under the left group: Aut(a2)^1,
        // since c3 is connected.
        assert_eq!(g.left.order(), 2);
        assert_eq!(g.ambient.order(), 2);
    }

    #[test]
    fn flip_is_an_automorphism() {
        for p in [FinitePoset::chain(3), FinitePoset::diamond(), FinitePoset::antichain(2)] {
            let pp = FinitePoset::product(&p, &p);
            assert!(pp.is_automorphism(&flip(p.size()).perm));
        }
    }

    #[test]
    fn flip_reports() {
        let r = flip_generated(&FinitePoset::chain(2)).unwrap();
        assert_eq!(r, FlipReport { flip_in_closure: false, closure_size: 1, aut_size: 2 });
        let r = flip_generated(&FinitePoset::diamond()).unwrap();
        assert_eq!(r, FlipReport { flip_in_closure: false, closure_size: 4, aut_size: 24 });
        assert!(flip_generated(&FinitePoset::antichain(2)).unwrap().flip_in_closure);
        for n in 1..=4 {
            let r = flip_generated(&FinitePoset::chain(n)).unwrap();
            assert_eq!(r.flip_in_closure, n == 1);
            let r = flip_generated(&FinitePoset::antichain(n)).unwrap();
            assert!(r.flip_in_closure);
            // The stage groups already generate all of Sym(n^2).
            assert_eq!(r.closure_size, r.aut_size);
        }
    }

    #[test]
    fn isomorphism_classes() {
        let counts: Vec<_> = (1..=4).map(|n| posets_up_to_iso(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16]);
    }

    #[test]
    fn dichotomy_up_to_three() {
        let cases = dichotomy_sweep(3).unwrap();
        assert_eq!(cases.len(), 8);
        assert!(cases.iter().all(DichotomyCase::holds));
    }

    #[test]
    fn text_round_trip() {
        let p: FinitePoset = "4\n0 < 1\n# comment\n1 < 2\n\n0 < 3\n".parse().unwrap();
        assert!(p.leq(0, 2));
        let again: FinitePoset = p.to_string().parse().unwrap();
        assert_eq!(again, p);
        assert_eq!("2\n0 < 1\n1 < 0".parse::<FinitePoset>().unwrap_err(), PosetError::NotAntisymmetric(0, 1));
        assert!(matches!("2\n0 < 5".parse::<FinitePoset>(), Err(PosetError::OutOfRange { element: 5, size: 2 })));
        assert!(matches!("x".parse::<FinitePoset>(), Err(PosetError::Parse { line: 1, .. })));
    }
}
