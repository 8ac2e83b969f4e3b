//! Permutation groups given by generators, stored as a stabilizer chain.
//!
//! A deterministic Schreier–Sims construction gives the order, membership
//! tests and element enumeration without listing the group.
//!
//! Permutations are image tables: `g[i]` is the image of `i`, and products
//! are right-to-left, so `(a ∘ b)[i] = a[b[i]]`.

pub type Perm = Vec<usize>;

pub fn identity(degree: usize) -> Perm {
    (0..degree).collect()
}

/// `a ∘ b`: apply `b`, then `a`.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&x| a[x]).collect()
}

pub fn invert(a: &[usize]) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x] = i;
    }
    out
}

fn is_identity(a: &[usize]) -> bool {
    a.iter().enumerate().all(|(i, &x)| i == x)
}

#[derive(Debug, Clone)]
struct Level {
    base: usize,
    generators: Vec<Perm>,
    /// `transversal[q]` maps the base point to `q`, for `q` in the orbit.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(degree: usize, base: usize) -> Self {
        let mut transversal = vec![None; degree];
        transversal[base] = Some(identity(degree));
        Level { base, generators: Vec::new(), transversal, orbit: vec![base] }
    }
}

/// A subgroup of `Sym(degree)`.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, generators: Vec::new(), levels: Vec::new() }
    }

    /// The group generated by `generators`; each must be a permutation of
    /// `0..degree`.
    pub fn new(degree: usize, generators: &[Perm]) -> Self {
        let mut group = Self::trivial(degree);
        for g in generators {
            assert_eq!(g.len(), degree, "generator has the wrong degree");
            if !group.contains(g) {
                group.generators.push(g.clone());
                group.extend(0, g.clone());
            }
        }
        group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// A generating set with no generator in the span of the earlier ones.
    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, g: &[usize]) -> bool {
        g.len() == self.degree && self.sift(0, g.to_vec()).is_none()
    }

    /// Whether every generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// All elements in lexicographic order of their tables.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = vec![identity(self.degree)];
        // Every element is t_0 ∘ t_1 ∘ ... with t_i from the i-th transversal.
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &q in &level.orbit {
                let t = level.transversal[q].as_ref().expect("orbit point has a transversal");
                next.extend(out.iter().map(|g| compose(t, g)));
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Strips `g` through the chain from `start`; `None` when it reduces
    /// to the identity, otherwise the residue.
    fn sift(&self, start: usize, mut g: Perm) -> Option<Perm> {
        for level in &self.levels[start.min(self.levels.len())..] {
            let Some(t) = &level.transversal[g[level.base]] else { return Some(g) };
            g = compose(&invert(t), &g);
        }
        (!is_identity(&g)).then_some(g)
    }

    /// Adds `g`, which fixes the base points of levels before `k`, to the
    /// generators of level `k` and closes the chain under Schreier
    /// generators.
    fn extend(&mut self, k: usize, g: Perm) {
        if k == self.levels.len() {
            let base = g.iter().enumerate().position(|(i, &x)| i != x).expect("extend needs a non-identity element");
            self.levels.push(Level::new(self.degree, base));
        }
        self.levels[k].generators.push(g.clone());
        // Every (orbit point, generator) pair yields one Schreier generator;
        // old points meet only the new generator, new points meet all.
        let mut pending: Vec<(usize, Perm)> = self.levels[k].orbit.iter().map(|&p| (p, g.clone())).collect();
        while let Some((p, s)) = pending.pop() {
            let level = &mut self.levels[k];
            let q = s[p];
            let via = compose(&s, level.transversal[p].as_ref().expect("orbit point has a transversal"));
            match &level.transversal[q] {
                None => {
                    level.transversal[q] = Some(via);
                    level.orbit.push(q);
                    pending.extend(level.generators.iter().map(|h| (q, h.clone())));
                }
                Some(t) => {
                    let schreier = compose(&invert(t), &via);
                    if let Some(residue) = self.sift(k + 1, schreier) {
                        self.extend(k + 1, residue);
                    }
                }
            }
        }
        self.levels[k].orbit.sort_unstable();
    }
}
