//! Finite groups as explicit multiplication tables.
//!
//! Elements are dense ids `0..order`. `table(a, b)` is the product `a·b`.
//! Homogeneous graphs act on the left, so the neighbour of vertex `x`
//! along generator `a` is `table(a, x)`.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Element id inside a [`FiniteGroup`].
pub type Element = usize;

/// Largest group order accepted by [`build_group`].
pub const DEFAULT_ORDER_CAP: usize = 1 << 16;

/// Above this order associativity is sampled instead of checked exhaustively.
pub const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 256;

/// Number of random triples sampled above [`EXHAUSTIVE_ASSOCIATIVITY_LIMIT`].
pub const SAMPLED_ASSOCIATIVITY_TRIPLES: usize = 1_000_000;

const ASSOCIATIVITY_SEED: u64 = 0x6761_7062_6f75_6e64;

/// Description of a group to construct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    /// `Z_n` with elements `0..n` and addition mod `n`.
    Cyclic(usize),
    /// `Z_2^n`; element ids are bitmasks and the product is XOR.
    ElementaryAbelian2(usize),
    /// Cartesian product; the first factor is the most significant digit
    /// of the mixed-radix element id.
    DirectProduct(Vec<GroupSpec>),
    /// Explicit table, `table[a][b] = a·b`.
    Table(Vec<Vec<usize>>),
}

/// The group axiom an explicit table failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupAxiom {
    /// Table is not square or has an entry outside `0..order`.
    Closure,
    Identity,
    LatinSquare,
    Inverse,
    Associativity,
}

impl std::fmt::Display for GroupAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            GroupAxiom::Closure => "closure",
            GroupAxiom::Identity => "identity",
            GroupAxiom::LatinSquare => "latin square",
            GroupAxiom::Inverse => "inverse",
            GroupAxiom::Associativity => "associativity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group order {order} exceeds the cap of {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error("invalid group description: {0}")]
    InvalidSpec(String),
    #[error("table violates the {axiom} axiom (witness {witness:?})")]
    NonGroupTable { axiom: GroupAxiom, witness: Vec<usize> },
    #[error("generator set contains the identity")]
    ContainsIdentity,
    #[error("generator {element} is not an element of a group of order {order}")]
    OutOfRange { element: usize, order: usize },
    #[error("generator set is not symmetric: {element} present but its inverse {inverse} is not")]
    NotSymmetric { element: Element, inverse: Element },
    #[error("generator set reaches only {reached} of {order} elements")]
    NotGenerating { reached: usize, order: usize },
}

/// A finite group stored as a dense multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    identity: Element,
    inverse: Vec<u32>,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Element {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inverse(&self, a: Element) -> Element {
        self.inverse[a] as usize
    }

    /// `a x a^-1`.
    pub fn conjugate(&self, a: Element, x: Element) -> Element {
        self.mul(self.mul(a, x), self.inverse(a))
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order
    }

    /// The table as nested rows, the same layout [`GroupSpec::Table`] takes.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.order)
            .map(|row| row.iter().map(|&v| v as usize).collect())
            .collect()
    }

    /// True when every pair of elements commutes.
    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    fn from_fn(order: usize, identity: Element, product: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                table.push(product(a, b) as u32);
            }
        }
        let mut inverse = vec![0u32; order];
        for a in 0..order {
            let row = &table[a * order..(a + 1) * order];
            let inv = row
                .iter()
                .position(|&v| v as usize == identity)
                .expect("constructed groups always have inverses");
            inverse[a] = inv as u32;
        }
        Self {
            order,
            table,
            identity,
            inverse,
        }
    }
}

/// Builds a group, rejecting orders above [`DEFAULT_ORDER_CAP`].
pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup, GroupError> {
    build_group_with_cap(spec, DEFAULT_ORDER_CAP)
}

pub fn build_group_with_cap(spec: &GroupSpec, cap: usize) -> Result<FiniteGroup, GroupError> {
    let order = spec_order(spec, cap)?;
    if order > cap {
        return Err(GroupError::TooLarge { order, cap });
    }
    match spec {
        GroupSpec::Cyclic(n) => Ok(FiniteGroup::from_fn(*n, 0, |a, b| (a + b) % n)),
        GroupSpec::ElementaryAbelian2(_) => Ok(FiniteGroup::from_fn(order, 0, |a, b| a ^ b)),
        GroupSpec::DirectProduct(factors) => {
            let groups = factors
                .iter()
                .map(|f| build_group_with_cap(f, cap))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(direct_product(&groups))
        }
        GroupSpec::Table(rows) => from_table(rows),
    }
}

fn spec_order(spec: &GroupSpec, cap: usize) -> Result<usize, GroupError> {
    let too_large = |order| GroupError::TooLarge { order, cap };
    match spec {
        GroupSpec::Cyclic(0) => Err(GroupError::InvalidSpec("cyclic group of order 0".into())),
        GroupSpec::Cyclic(n) => Ok(*n),
        GroupSpec::ElementaryAbelian2(n) => {
            if *n >= usize::BITS as usize - 1 {
                return Err(too_large(usize::MAX));
            }
            Ok(1usize << n)
        }
        GroupSpec::DirectProduct(factors) => {
            if factors.is_empty() {
                return Err(GroupError::InvalidSpec("direct product of no factors".into()));
            }
            factors.iter().try_fold(1usize, |acc, f| {
                let o = spec_order(f, cap)?;
                acc.checked_mul(o)
                    .filter(|&p| p <= cap)
                    .ok_or_else(|| too_large(acc.saturating_mul(o)))
            })
        }
        GroupSpec::Table(rows) if rows.is_empty() => Err(GroupError::InvalidSpec("empty multiplication table".into())),
        GroupSpec::Table(rows) => Ok(rows.len()),
    }
}

fn direct_product(groups: &[FiniteGroup]) -> FiniteGroup {
    let orders: Vec<usize> = groups.iter().map(FiniteGroup::order).collect();
    let order: usize = orders.iter().product();
    let split = |mut id: usize| {
        let mut digits = vec![0usize; orders.len()];
        for (slot, &o) in digits.iter_mut().zip(&orders).rev() {
            *slot = id % o;
            id /= o;
        }
        digits
    };
    let join = |digits: &[usize]| digits.iter().zip(&orders).fold(0, |acc, (&d, &o)| acc * o + d);
    let identity = join(&groups.iter().map(FiniteGroup::identity).collect::<Vec<_>>());
    let digits: Vec<Vec<usize>> = (0..order).map(split).collect();
    FiniteGroup::from_fn(order, identity, |a, b| {
        let prod: Vec<usize> = groups
            .iter()
            .enumerate()
            .map(|(i, g)| g.mul(digits[a][i], digits[b][i]))
            .collect();
        join(&prod)
    })
}

fn non_group(axiom: GroupAxiom, witness: Vec<usize>) -> GroupError {
    GroupError::NonGroupTable { axiom, witness }
}

fn from_table(rows: &[Vec<usize>]) -> Result<FiniteGroup, GroupError> {
    let order = rows.len();
    for (a, row) in rows.iter().enumerate() {
        if row.len() != order {
            return Err(non_group(GroupAxiom::Closure, vec![a]));
        }
        if let Some(b) = row.iter().position(|&v| v >= order) {
            return Err(non_group(GroupAxiom::Closure, vec![a, b]));
        }
    }
    let at = |a: usize, b: usize| rows[a][b];

    let identity = (0..order)
        .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
        .ok_or_else(|| non_group(GroupAxiom::Identity, vec![]))?;

    for a in 0..order {
        let mut seen_row = vec![false; order];
        let mut seen_col = vec![false; order];
        for b in 0..order {
            if std::mem::replace(&mut seen_row[at(a, b)], true) {
                return Err(non_group(GroupAxiom::LatinSquare, vec![a, b]));
            }
            if std::mem::replace(&mut seen_col[at(b, a)], true) {
                return Err(non_group(GroupAxiom::LatinSquare, vec![b, a]));
            }
        }
    }

    let mut inverse = vec![0u32; order];
    for x in 0..order {
        let inv = (0..order)
            .find(|&y| at(y, x) == identity && at(x, y) == identity)
            .ok_or_else(|| non_group(GroupAxiom::Inverse, vec![x]))?;
        inverse[x] = inv as u32;
    }

    let assoc = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
    if order <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if !assoc(a, b, c) {
                        return Err(non_group(GroupAxiom::Associativity, vec![a, b, c]));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(ASSOCIATIVITY_SEED);
        for _ in 0..SAMPLED_ASSOCIATIVITY_TRIPLES {
            let (a, b, c) = (
                rng.gen_range(0..order),
                rng.gen_range(0..order),
                rng.gen_range(0..order),
            );
            if !assoc(a, b, c) {
                return Err(non_group(GroupAxiom::Associativity, vec![a, b, c]));
            }
        }
    }

    Ok(FiniteGroup {
        order,
        table: rows.iter().flatten().map(|&v| v as u32).collect(),
        identity,
        inverse,
    })
}

/// A symmetric generating set not containing the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    elements: Vec<Element>,
}

impl GeneratorSet {
    /// Validates and sorts the generators. Duplicates are collapsed.
    pub fn new(group: &FiniteGroup, elements: &[Element]) -> Result<Self, GroupError> {
        let set: BTreeSet<Element> = elements.iter().copied().collect();
        for &a in &set {
            if a >= group.order() {
                return Err(GroupError::OutOfRange {
                    element: a,
                    order: group.order(),
                });
            }
            if a == group.identity() {
                return Err(GroupError::ContainsIdentity);
            }
        }
        for &a in &set {
            let inverse = group.inverse(a);
            if !set.contains(&inverse) {
                return Err(GroupError::NotSymmetric { element: a, inverse });
            }
        }
        let reached = reachable_count(group, &set);
        if reached != group.order() {
            return Err(GroupError::NotGenerating {
                reached,
                order: group.order(),
            });
        }
        Ok(Self {
            elements: set.into_iter().collect(),
        })
    }

    /// The standard basis `e_1..e_n` of `Z_2^n`.
    pub fn hypercube_basis(dim: usize) -> Vec<Element> {
        (0..dim).map(|i| 1 << i).collect()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, a: Element) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    /// Position of `a` in [`Self::elements`].
    pub fn index_of(&self, a: Element) -> Option<usize> {
        self.elements.binary_search(&a).ok()
    }
}

fn reachable_count(group: &FiniteGroup, gens: &BTreeSet<Element>) -> usize {
    let mut seen = vec![false; group.order()];
    let mut queue = VecDeque::from([group.identity()]);
    seen[group.identity()] = true;
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &a in gens {
            let y = group.mul(a, x);
            if !seen[y] {
                seen[y] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count
}

/// `{ a k a^-1 : k in K }` as a sorted set.
pub fn conjugate_set(group: &FiniteGroup, gens: &GeneratorSet, a: Element) -> BTreeSet<Element> {
    gens.elements().iter().map(|&k| group.conjugate(a, k)).collect()
}

/// True iff conjugation by every generator maps the generator set onto itself.
pub fn check_invariance(group: &FiniteGroup, gens: &GeneratorSet) -> bool {
    gens.elements()
        .iter()
        .all(|&a| gens.elements().iter().all(|&k| gens.contains(group.conjugate(a, k))))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// S3 as permutations of {0,1,2}, composed right-to-left.
    fn s3_table() -> (Vec<Vec<usize>>, Vec<[usize; 3]>) {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|p| perms.iter().map(|q| index([p[q[0]], p[q[1]], p[q[2]]])).collect())
            .collect();
        (table, perms)
    }

    #[test]
    fn trivial_group() {
        let g = build_group(&GroupSpec::Cyclic(1)).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.identity(), 0);
        assert_eq!(g.mul(0, 0), 0);
    }

    #[test]
    fn elementary_abelian_is_self_inverse() {
        let g = build_group(&GroupSpec::ElementaryAbelian2(3)).unwrap();
        assert_eq!(g.order(), 8);
        assert!(g.elements().all(|x| g.inverse(x) == x));
    }

    #[test]
    fn cyclic_six_matches_modular_arithmetic() {
        let g = build_group(&GroupSpec::Cyclic(6)).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(g.mul(a, b), (a + b) % 6);
            }
        }
        assert_eq!(g.inverse(1), 5);
    }

    #[test]
    fn direct_product_of_cyclics() {
        let spec = GroupSpec::DirectProduct(vec![GroupSpec::Cyclic(2), GroupSpec::Cyclic(3)]);
        let g = build_group(&spec).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.identity(), 0);
        // (1,2) * (1,2) = (0,1) -> id 1
        assert_eq!(g.mul(5, 5), 1);
        assert!(g.is_abelian());
    }

    #[test]
    fn explicit_table_round_trips() {
        let (table, _) = s3_table();
        let g = build_group(&GroupSpec::Table(table.clone())).unwrap();
        assert_eq!(g.table_rows(), table);
        assert!(!g.is_abelian());
    }

    #[test]
    fn rejects_non_latin_table() {
        let table = vec![vec![0, 1], vec![1, 1]];
        let err = build_group(&GroupSpec::Table(table)).unwrap_err();
        assert!(matches!(
            err,
            GroupError::NonGroupTable {
                axiom: GroupAxiom::LatinSquare,
                ..
            }
        ));
    }

    #[test]
    fn rejects_missing_identity() {
        let table = vec![vec![1, 0], vec![0, 1]];
        // 1 acts as identity here; swap so nothing does.
        let table2 = vec![vec![1, 0], vec![1, 0]];
        assert!(build_group(&GroupSpec::Table(table)).is_ok());
        let err = build_group(&GroupSpec::Table(table2)).unwrap_err();
        assert!(matches!(
            err,
            GroupError::NonGroupTable {
                axiom: GroupAxiom::Identity,
                ..
            }
        ));
    }

    #[test]
    fn rejects_non_associative_loop() {
        // A Latin square with identity 0 that is not associative (order-5 loop).
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = build_group(&GroupSpec::Table(table)).unwrap_err();
        match err {
            GroupError::NonGroupTable {
                axiom: GroupAxiom::Associativity,
                witness,
            } => assert_eq!(witness.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_ragged_table() {
        let err = build_group(&GroupSpec::Table(vec![vec![0, 1], vec![1]])).unwrap_err();
        assert!(matches!(
            err,
            GroupError::NonGroupTable {
                axiom: GroupAxiom::Closure,
                ..
            }
        ));
    }

    #[test]
    fn order_cap_is_enforced() {
        let err = build_group_with_cap(&GroupSpec::Cyclic(100), 64).unwrap_err();
        assert_eq!(err, GroupError::TooLarge { order: 100, cap: 64 });
        let err = build_group(&GroupSpec::ElementaryAbelian2(17)).unwrap_err();
        assert!(matches!(err, GroupError::TooLarge { .. }));
    }

    #[test]
    fn generator_validation() {
        let g = build_group(&GroupSpec::Cyclic(6)).unwrap();
        assert_eq!(GeneratorSet::new(&g, &[0, 1, 5]), Err(GroupError::ContainsIdentity));
        assert_eq!(
            GeneratorSet::new(&g, &[1]),
            Err(GroupError::NotSymmetric { element: 1, inverse: 5 })
        );
        assert_eq!(
            GeneratorSet::new(&g, &[2, 4]),
            Err(GroupError::NotGenerating { reached: 3, order: 6 })
        );
        assert!(matches!(
            GeneratorSet::new(&g, &[7]),
            Err(GroupError::OutOfRange { .. })
        ));
        let k = GeneratorSet::new(&g, &[5, 1, 1]).unwrap();
        assert_eq!(k.elements(), &[1, 5]);
    }

    #[test]
    fn abelian_groups_are_invariant() {
        let g = build_group(&GroupSpec::ElementaryAbelian2(3)).unwrap();
        let k = GeneratorSet::new(&g, &GeneratorSet::hypercube_basis(3)).unwrap();
        assert!(check_invariance(&g, &k));
        let c = build_group(&GroupSpec::Cyclic(7)).unwrap();
        let k = GeneratorSet::new(&c, &[2, 3, 4, 5]).unwrap();
        assert!(check_invariance(&c, &k));
    }

    #[test]
    fn s3_single_transposition_is_not_invariant() {
        let (table, perms) = s3_table();
        let g = build_group(&GroupSpec::Table(table)).unwrap();
        // Transpositions (ids 1,2,3) are self-inverse, so {t} is symmetric,
        // but {t} alone does not generate S3. Pair it with a 3-cycle and
        // its inverse to get a generating, symmetric, non-invariant set.
        let gens = GeneratorSet::new(&g, &[1, 4, 5]).unwrap();
        // Brute-force oracle: compose permutations directly.
        let compose = |p: [usize; 3], q: [usize; 3]| [p[q[0]], p[q[1]], p[q[2]]];
        let invert = |p: [usize; 3]| {
            let mut r = [0; 3];
            for i in 0..3 {
                r[p[i]] = i;
            }
            r
        };
        let set: Vec<[usize; 3]> = gens.elements().iter().map(|&i| perms[i]).collect();
        let oracle = set
            .iter()
            .all(|&a| set.iter().all(|&k| set.contains(&compose(compose(a, k), invert(a)))));
        assert!(!oracle);
        assert!(!check_invariance(&g, &gens));
        // All three transpositions form a conjugacy class, hence invariant.
        let all_t = GeneratorSet::new(&g, &[1, 2, 3]).unwrap();
        assert!(check_invariance(&g, &all_t));
    }

    #[test]
    fn sampled_associativity_above_limit() {
        let c = build_group(&GroupSpec::Cyclic(300)).unwrap();
        let g = build_group(&GroupSpec::Table(c.table_rows())).unwrap();
        assert_eq!(g, c);
    }
}
