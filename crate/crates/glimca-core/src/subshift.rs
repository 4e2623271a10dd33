//! Subshifts of finite type and their decision procedures.
//!
//! An SFT is stored as its window length `n`, the set of allowed `n`-words,
//! and the pruned word graph: vertices are `(n-1)`-words, edges are allowed
//! `n`-words, and pruning repeatedly deletes vertices with no incoming or no
//! outgoing edge. What survives is exactly the part lying on bi-infinite
//! paths, so graph questions (reachability, cycle structure) answer the
//! dynamical ones (transitivity, mixing, chain components, periodic factors).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::alphabet::{Alphabet, Sym};
use crate::engine::determined_image;
use crate::error::{Error, Result};
use crate::rule::LocalRule;
use crate::sample::LanguageSample;

/// Guard for the `|A|^window` enumeration in [`Sft::from_forbidden`].
const ENUM_CAP: u64 = 1 << 22;

#[derive(Clone, Debug)]
struct Edge {
    from: usize,
    to: usize,
    word: Vec<Sym>,
}

/// A subshift of finite type with its pruned de Bruijn graph.
#[derive(Clone, Debug)]
pub struct Sft {
    alphabet: Alphabet,
    window: usize,
    allowed: BTreeSet<Vec<Sym>>,
    vertices: Vec<Vec<Sym>>,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl PartialEq for Sft {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.window == other.window
            && self.pruned_words() == other.pruned_words()
    }
}

impl Eq for Sft {}

impl Sft {
    /// The SFT of all points avoiding every word in `forbidden`.
    pub fn from_forbidden(alphabet: Alphabet, forbidden: &[Vec<Sym>]) -> Result<Self> {
        if forbidden.iter().any(|w| w.is_empty()) {
            return Err(Error::BadParameter("forbidden words must be nonempty".to_string()));
        }
        for w in forbidden {
            if let Some(bad) = w.iter().find(|s| s.idx() >= alphabet.len()) {
                return Err(Error::UnknownSymbol(alloc::format!("symbol index {}", bad.0)));
            }
        }
        let window = forbidden.iter().map(|w| w.len()).max().unwrap_or(0).max(2);
        let count = alphabet.count_words(window);
        if count > ENUM_CAP as u128 {
            return Err(Error::BudgetExceeded { needed: count, cap: ENUM_CAP });
        }
        let allowed: BTreeSet<Vec<Sym>> = alphabet
            .words(window)
            .filter(|w| {
                !forbidden.iter().any(|f| w.windows(f.len()).any(|piece| piece == &f[..]))
            })
            .collect();
        Ok(Self::build(alphabet, window, allowed))
    }

    /// The SFT whose window-`n` words are exactly `allowed`.
    pub fn from_allowed<I>(alphabet: Alphabet, n: usize, allowed: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Sym>>,
    {
        if n == 0 {
            return Err(Error::BadParameter("window must be at least 1".to_string()));
        }
        let mut set = BTreeSet::new();
        for w in allowed {
            if w.len() != n {
                return Err(Error::WindowLen { expected: n, got: w.len() });
            }
            if let Some(bad) = w.iter().find(|s| s.idx() >= alphabet.len()) {
                return Err(Error::UnknownSymbol(alloc::format!("symbol index {}", bad.0)));
            }
            set.insert(w);
        }
        Ok(Self::build(alphabet, n, set))
    }

    /// The order-`n` approximation of whatever language the sample holds:
    /// the SFT allowing exactly the sample's `n`-words.
    pub fn approximation(sample: &LanguageSample, n: usize) -> Result<Self> {
        let words = sample.words(n)?;
        Self::from_allowed(sample.alphabet().clone(), n, words.iter().cloned())
    }

    fn build(alphabet: Alphabet, window: usize, allowed: BTreeSet<Vec<Sym>>) -> Self {
        // Vertices: all prefixes and suffixes of allowed words.
        let mut vset: BTreeSet<Vec<Sym>> = BTreeSet::new();
        for w in &allowed {
            vset.insert(w[..window - 1].to_vec());
            vset.insert(w[1..].to_vec());
        }
        let all_vertices: Vec<Vec<Sym>> = vset.into_iter().collect();
        let vid: BTreeMap<&[Sym], usize> =
            all_vertices.iter().enumerate().map(|(i, w)| (&w[..], i)).collect();
        let mut edges: Vec<Edge> = allowed
            .iter()
            .map(|w| Edge { from: vid[&w[..window - 1]], to: vid[&w[1..]], word: w.clone() })
            .collect();

        // Prune: drop vertices lacking incoming or outgoing edges, repeat.
        let nv = all_vertices.len();
        let mut vertex_alive = alloc::vec![true; nv];
        let mut edge_alive = alloc::vec![true; edges.len()];
        loop {
            let mut indeg = alloc::vec![0usize; nv];
            let mut outdeg = alloc::vec![0usize; nv];
            for (k, e) in edges.iter().enumerate() {
                if edge_alive[k] {
                    outdeg[e.from] += 1;
                    indeg[e.to] += 1;
                }
            }
            let mut changed = false;
            for v in 0..nv {
                if vertex_alive[v] && (indeg[v] == 0 || outdeg[v] == 0) {
                    vertex_alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            for (k, e) in edges.iter().enumerate() {
                if edge_alive[k] && (!vertex_alive[e.from] || !vertex_alive[e.to]) {
                    edge_alive[k] = false;
                }
            }
        }

        // Compact to the surviving sub-graph, preserving sorted order.
        let mut remap = alloc::vec![usize::MAX; nv];
        let mut vertices = Vec::new();
        for (v, word) in all_vertices.into_iter().enumerate() {
            if vertex_alive[v] {
                remap[v] = vertices.len();
                vertices.push(word);
            }
        }
        let kept: Vec<Edge> = edges
            .drain(..)
            .zip(edge_alive)
            .filter(|(_, alive)| *alive)
            .map(|(e, _)| Edge { from: remap[e.from], to: remap[e.to], word: e.word })
            .collect();
        let mut out_adj = alloc::vec![Vec::new(); vertices.len()];
        let mut in_adj = alloc::vec![Vec::new(); vertices.len()];
        for (k, e) in kept.iter().enumerate() {
            out_adj[e.from].push(k);
            in_adj[e.to].push(k);
        }
        Sft { alphabet, window, allowed, vertices, edges: kept, out_adj, in_adj }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// The defining allowed words, before pruning.
    pub fn allowed_words(&self) -> &BTreeSet<Vec<Sym>> {
        &self.allowed
    }

    /// The window-length words that survive pruning (= `language(window)`).
    pub fn pruned_words(&self) -> BTreeSet<Vec<Sym>> {
        self.edges.iter().map(|e| e.word.clone()).collect()
    }

    /// True when no point satisfies the constraints.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// All length-`k` words occurring in points of the subshift. Cost grows
    /// like the language itself (up to `|A|^k`); keep `k` moderate.
    pub fn language(&self, k: usize) -> BTreeSet<Vec<Sym>> {
        if self.is_empty() {
            return BTreeSet::new();
        }
        if k == 0 {
            return [Vec::new()].into_iter().collect();
        }
        let vlen = self.window - 1;
        if k <= vlen {
            return self
                .vertices
                .iter()
                .flat_map(|w| w.windows(k).map(|piece| piece.to_vec()))
                .collect();
        }
        // Extend vertex words along edges, one symbol per step.
        let mut frontier: BTreeSet<(Vec<Sym>, usize)> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(v, w)| (w.clone(), v))
            .collect();
        for _ in 0..k - vlen {
            let mut next = BTreeSet::new();
            for (word, v) in &frontier {
                for &eid in &self.out_adj[*v] {
                    let e = &self.edges[eid];
                    let mut longer = word.clone();
                    longer.push(*e.word.last().expect("windows are nonempty"));
                    next.insert((longer, e.to));
                }
            }
            frontier = next;
        }
        frontier.into_iter().map(|(w, _)| w).collect()
    }

    fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySubshift)
        } else {
            Ok(())
        }
    }

    /// Strongly connected components as sorted vertex-id lists, ordered by
    /// smallest member.
    fn sccs(&self) -> Vec<Vec<usize>> {
        let nv = self.vertices.len();
        let mut order = Vec::with_capacity(nv);
        let mut seen = alloc::vec![false; nv];
        for s in 0..nv {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = alloc::vec![(s, 0usize)];
            while let Some((v, i)) = stack.pop() {
                if i < self.out_adj[v].len() {
                    stack.push((v, i + 1));
                    let w = self.edges[self.out_adj[v][i]].to;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                }
            }
        }
        let mut comp = alloc::vec![usize::MAX; nv];
        let mut count = 0;
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = alloc::vec![s];
            comp[s] = count;
            while let Some(v) = stack.pop() {
                for &eid in &self.in_adj[v] {
                    let u = self.edges[eid].from;
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        let mut groups = alloc::vec![Vec::new(); count];
        for v in 0..nv {
            groups[comp[v]].push(v);
        }
        groups.sort_by_key(|g| g[0]);
        groups
    }

    /// True iff any word can be followed by any other within the subshift:
    /// the pruned graph is one strongly connected component.
    pub fn is_transitive(&self) -> Result<bool> {
        self.require_nonempty()?;
        Ok(self.sccs().len() == 1)
    }

    /// Per strongly connected component (in order of smallest vertex), the
    /// gcd of its cycle lengths. Components without internal edges carry no
    /// cycles and are skipped.
    pub fn sigma_period(&self) -> Result<Vec<usize>> {
        self.require_nonempty()?;
        let mut comp_of = alloc::vec![usize::MAX; self.vertices.len()];
        let groups = self.sccs();
        for (c, group) in groups.iter().enumerate() {
            for &v in group {
                comp_of[v] = c;
            }
        }
        let mut periods = Vec::new();
        for group in &groups {
            let internal = |eid: &usize| {
                let e = &self.edges[*eid];
                comp_of[e.from] == comp_of[e.to] && comp_of[e.from] == comp_of[group[0]]
            };
            if !group.iter().any(|&v| self.out_adj[v].iter().any(internal)) {
                continue;
            }
            // BFS levels inside the component, then gcd of level slips.
            let mut level: BTreeMap<usize, i64> = BTreeMap::new();
            level.insert(group[0], 0);
            let mut queue = alloc::vec![group[0]];
            while let Some(v) = queue.pop() {
                for &eid in &self.out_adj[v] {
                    if !internal(&eid) {
                        continue;
                    }
                    let w = self.edges[eid].to;
                    if !level.contains_key(&w) {
                        level.insert(w, level[&v] + 1);
                        queue.push(w);
                    }
                }
            }
            let mut g: u64 = 0;
            for &v in group {
                for &eid in &self.out_adj[v] {
                    if internal(&eid) {
                        let w = self.edges[eid].to;
                        let slip = level[&v] + 1 - level[&w];
                        g = gcd(g, slip.unsigned_abs());
                    }
                }
            }
            periods.push(g as usize);
        }
        Ok(periods)
    }

    /// Transitive with coprime cycle lengths: long gaps of every residue are
    /// joinable.
    pub fn is_mixing(&self) -> Result<bool> {
        Ok(self.is_transitive()? && self.sigma_period()? == [1])
    }

    /// Rebuilds the same subshift with a larger window.
    fn reblock(&self, m: usize) -> Result<Sft> {
        if m == self.window {
            Ok(self.clone())
        } else if m > self.window {
            Sft::from_allowed(self.alphabet.clone(), m, self.language(m))
        } else {
            Err(Error::BadParameter("cannot shrink the window".to_string()))
        }
    }

    /// Classes of `n`-words under the symmetric-transitive closure of
    /// "occurs to the right in some point". Computed on the pruned graph at
    /// width `max(n, window)`: prefixes of consecutive edges are merged.
    pub fn chain_components(&self, n: usize) -> Result<ComponentPartition> {
        self.require_nonempty()?;
        if n == 0 {
            return Err(Error::BadParameter("component width must be at least 1".to_string()));
        }
        let m = n.max(self.window);
        let big = self.reblock(m)?;
        let words: Vec<Vec<Sym>> = self.language(n).into_iter().collect();
        let index: BTreeMap<&[Sym], usize> =
            words.iter().enumerate().map(|(i, w)| (&w[..], i)).collect();
        let mut uf = UnionFind::new(words.len());
        for v in 0..big.vertices.len() {
            // All edges through one vertex are consecutive pairs, so their
            // prefixes fall in one class.
            let mut anchor: Option<usize> = None;
            for &eid in big.in_adj[v].iter().chain(big.out_adj[v].iter()) {
                let p = index[&big.edges[eid].word[..n]];
                match anchor {
                    None => anchor = Some(p),
                    Some(a) => uf.union(a, p),
                }
            }
        }
        // Factors inside one edge are also co-occurrences.
        for e in &big.edges {
            let first = index[&e.word[..n]];
            for piece in e.word.windows(n) {
                uf.union(first, index[&piece[..]]);
            }
        }
        let mut by_root: BTreeMap<usize, Vec<Vec<Sym>>> = BTreeMap::new();
        for (i, w) in words.iter().enumerate() {
            by_root.entry(uf.find(i)).or_default().push(w.clone());
        }
        let mut classes: Vec<Vec<Vec<Sym>>> = by_root.into_values().collect();
        classes.sort_by(|a, b| a[0].cmp(&b[0]));
        Ok(ComponentPartition { n, classes })
    }

    /// The subshift of points all of whose `n`-windows lie in one class.
    pub fn component_sft(&self, partition: &ComponentPartition, idx: usize) -> Result<Sft> {
        let class: BTreeSet<&[Sym]> =
            partition.classes[idx].iter().map(|w| &w[..]).collect();
        let m = partition.n.max(self.window);
        let big = self.reblock(m)?;
        let allowed: Vec<Vec<Sym>> = big
            .edges
            .iter()
            .filter(|e| e.word.windows(partition.n).all(|piece| class.contains(piece)))
            .map(|e| e.word.clone())
            .collect();
        Sft::from_allowed(self.alphabet.clone(), m, allowed)
    }

    /// One component subshift per class of the partition.
    pub fn component_sfts(&self, partition: &ComponentPartition) -> Result<Vec<Sft>> {
        (0..partition.classes.len()).map(|i| self.component_sft(partition, i)).collect()
    }

    /// Order-`n` cover of the image `f(X)`: allowed words are the determined
    /// one-step images of the `(n+2r)`-words of `X`. Exact for the image's
    /// `n`-language.
    pub fn block_image(&self, rule: &LocalRule, n: usize) -> Result<Sft> {
        if rule.alphabet() != &self.alphabet {
            return Err(Error::BadAlphabet("rule and subshift alphabets differ".to_string()));
        }
        if n == 0 {
            return Err(Error::BadParameter("window must be at least 1".to_string()));
        }
        let mut images = BTreeSet::new();
        for w in self.language(n + 2 * rule.radius()) {
            images.insert(determined_image(rule, &w, 1)?);
        }
        Sft::from_allowed(self.alphabet.clone(), n, images)
    }

    /// Follows each chain component through one application of the rule and
    /// reports whether the induced class map is a permutation, and cyclic.
    pub fn component_permutation(&self, rule: &LocalRule, n: usize) -> Result<ComponentMap> {
        let partition = self.chain_components(n)?;
        let mut image_class = Vec::new();
        for idx in 0..partition.classes.len() {
            let comp = self.component_sft(&partition, idx)?;
            let image = comp.block_image(rule, n)?;
            let image_words = image.language(n);
            let mut target: Option<usize> = None;
            let mut consistent = !image_words.is_empty();
            for w in &image_words {
                match (partition.class_of(w), target) {
                    (None, _) => consistent = false,
                    (Some(c), None) => target = Some(c),
                    (Some(c), Some(prev)) => consistent &= c == prev,
                }
                if !consistent {
                    break;
                }
            }
            image_class.push(if consistent { target } else { None });
        }
        let k = partition.classes.len();
        let mut hit = alloc::vec![false; k];
        let mut is_permutation = true;
        for t in &image_class {
            match t {
                Some(c) if !hit[*c] => hit[*c] = true,
                _ => is_permutation = false,
            }
        }
        let is_cyclic = is_permutation && {
            // Walk the permutation from class 0; cyclic iff one orbit.
            let mut seen = 1usize;
            let mut at = image_class[0].unwrap();
            while at != 0 {
                at = image_class[at].unwrap();
                seen += 1;
            }
            seen == k
        };
        Ok(ComponentMap { partition, image_class, is_permutation, is_cyclic })
    }

    /// Looks for a level function into ℤ_p (p > 1) advanced by 1 along every
    /// pruned edge; such a grading is a periodic factor of the dynamics.
    pub fn periodic_factor_obstruction(&self) -> Result<Obstruction> {
        self.require_nonempty()?;
        let nv = self.vertices.len();
        let mut comp = alloc::vec![usize::MAX; nv];
        let mut potential = alloc::vec![0i64; nv];
        let mut count = 0;
        for s in 0..nv {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = alloc::vec![s];
            while let Some(v) = stack.pop() {
                for &eid in &self.out_adj[v] {
                    let w = self.edges[eid].to;
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        potential[w] = potential[v] + 1;
                        stack.push(w);
                    }
                }
                for &eid in &self.in_adj[v] {
                    let u = self.edges[eid].from;
                    if comp[u] == usize::MAX {
                        comp[u] = count;
                        potential[u] = potential[v] - 1;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        let mut moduli = alloc::vec![0u64; count];
        for e in &self.edges {
            let slip = potential[e.from] + 1 - potential[e.to];
            let c = comp[e.from];
            moduli[c] = gcd(moduli[c], slip.unsigned_abs());
        }
        // Pruned graphs always contain directed cycles, so each weak
        // component has at least one nonzero slip.
        debug_assert!(moduli.iter().all(|&m| m > 0));
        let p = moduli.iter().fold(0, |acc, &m| gcd(acc, m));
        let verdict = if p > 1 {
            ObstructionVerdict::Obstructed { p }
        } else if moduli.iter().all(|&m| m == 1) {
            ObstructionVerdict::Clear
        } else {
            ObstructionVerdict::Inconclusive
        };
        Ok(Obstruction { verdict, component_moduli: moduli })
    }

    /// The exact language up to `max_len`, packaged as a sample.
    pub fn language_sample(&self, max_len: usize) -> Result<LanguageSample> {
        LanguageSample::from_words(
            self.alphabet.clone(),
            max_len,
            self.language(max_len),
            crate::sample::Provenance::Exact,
        )
    }
}

/// Free-function form of [`Sft::approximation`].
pub fn sft_approximation(sample: &LanguageSample, n: usize) -> Result<Sft> {
    Sft::approximation(sample, n)
}

/// Transitivity of every order-`n` approximation up to `n_max`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainTransitivity {
    pub holds: bool,
    pub first_failure: Option<usize>,
    pub horizon: usize,
}

/// Checks `is_transitive(approximation(sample, n))` for `n = 1..=n_max`; an
/// empty approximation counts as a failure.
pub fn is_chain_transitive(sample: &LanguageSample, n_max: usize) -> Result<ChainTransitivity> {
    for n in 1..=n_max {
        let approx = Sft::approximation(sample, n)?;
        if approx.is_empty() || !approx.is_transitive()? {
            return Ok(ChainTransitivity { holds: false, first_failure: Some(n), horizon: n_max });
        }
    }
    Ok(ChainTransitivity { holds: true, first_failure: None, horizon: n_max })
}

/// Partition of the `n`-words into chain classes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComponentPartition {
    pub n: usize,
    pub classes: Vec<Vec<Vec<Sym>>>,
}

impl ComponentPartition {
    pub fn class_of(&self, word: &[Sym]) -> Option<usize> {
        self.classes.iter().position(|c| c.iter().any(|w| w == word))
    }
}

/// Where each chain class goes under the rule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComponentMap {
    pub partition: ComponentPartition,
    /// Class index each component maps into, when well-defined.
    pub image_class: Vec<Option<usize>>,
    pub is_permutation: bool,
    pub is_cyclic: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ObstructionVerdict {
    /// A ℤ_p grading exists; the subshift factors onto a p-cycle.
    Obstructed { p: u64 },
    /// Every weak component has coprime cycle structure; no such grading.
    Clear,
    /// Components disagree; no uniform grading, but the general finite-factor
    /// question is left open.
    Inconclusive,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Obstruction {
    pub verdict: ObstructionVerdict,
    pub component_moduli: Vec<u64>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::Builtin;
    use proptest::prelude::*;

    fn binary() -> Alphabet {
        Alphabet::binary()
    }

    fn forbid(words: &[&str]) -> Sft {
        let ab = binary();
        let f: Vec<Vec<Sym>> = words.iter().map(|w| ab.parse_word(w).unwrap()).collect();
        Sft::from_forbidden(ab, &f).unwrap()
    }

    fn words(set: &BTreeSet<Vec<Sym>>) -> Vec<alloc::string::String> {
        let ab = binary();
        set.iter().map(|w| ab.format_word(w)).collect()
    }

    #[test]
    fn construction_and_language() {
        let full = forbid(&[]);
        assert_eq!(full.window(), 2);
        assert_eq!(full.allowed_words().len(), 4);
        assert!(!full.is_empty());
        assert_eq!(full.language(3).len(), 8);

        let golden = forbid(&["11"]);
        assert_eq!(words(&golden.pruned_words()), ["00", "01", "10"]);
        assert_eq!(words(&golden.language(3)), ["000", "001", "010", "100", "101"]);

        let no10 = forbid(&["10"]);
        assert_eq!(words(&no10.pruned_words()), ["00", "01", "11"]);
        assert_eq!(words(&no10.language(1)), ["0", "1"]);
    }

    #[test]
    fn pruning_removes_dead_ends() {
        // Forbidding 00 and 01 leaves no way to continue after a 0.
        let sft = forbid(&["00", "01"]);
        assert_eq!(words(&sft.pruned_words()), ["11"]);
        assert_eq!(words(&sft.language(1)), ["1"]);
        // Nothing at all: 0 and 1 both dead.
        let empty = forbid(&["00", "01", "11"]);
        assert!(empty.is_empty());
        assert!(matches!(empty.is_transitive(), Err(Error::EmptySubshift)));
        assert_eq!(empty.language(2).len(), 0);
    }

    #[test]
    fn transitivity_mixing_period_goldens() {
        let full = forbid(&[]);
        assert!(full.is_transitive().unwrap());
        assert!(full.is_mixing().unwrap());
        assert_eq!(full.sigma_period().unwrap(), [1]);

        let golden = forbid(&["11"]);
        assert!(golden.is_mixing().unwrap());

        let alt = forbid(&["00", "11"]);
        assert!(alt.is_transitive().unwrap());
        assert!(!alt.is_mixing().unwrap());
        assert_eq!(alt.sigma_period().unwrap(), [2]);

        let no10 = forbid(&["10"]);
        assert!(!no10.is_transitive().unwrap());
        assert_eq!(no10.sigma_period().unwrap(), [1, 1]);

        let fixed = forbid(&["01", "10"]);
        assert!(!fixed.is_transitive().unwrap());
        assert_eq!(fixed.sigma_period().unwrap(), [1, 1]);
    }

    #[test]
    fn obstruction_goldens() {
        assert_eq!(
            forbid(&["00", "11"]).periodic_factor_obstruction().unwrap().verdict,
            ObstructionVerdict::Obstructed { p: 2 }
        );
        assert_eq!(
            forbid(&[]).periodic_factor_obstruction().unwrap().verdict,
            ObstructionVerdict::Clear
        );
        assert_eq!(
            forbid(&["01", "10"]).periodic_factor_obstruction().unwrap().verdict,
            ObstructionVerdict::Clear
        );
        // Disjoint union of a fixed point and a 2-cycle: moduli 1 and 2.
        let ab = Alphabet::from_chars("012").unwrap();
        let allowed = ["00", "12", "21"].map(|w| ab.parse_word(w).unwrap());
        let mixed = Sft::from_allowed(ab, 2, allowed).unwrap();
        let obs = mixed.periodic_factor_obstruction().unwrap();
        assert_eq!(obs.verdict, ObstructionVerdict::Inconclusive);
        assert_eq!(obs.component_moduli, [1, 2]);
    }

    #[test]
    fn chain_component_goldens() {
        let fixed = forbid(&["01", "10"]);
        let parts = fixed.chain_components(1).unwrap();
        assert_eq!(parts.classes.len(), 2);
        assert_eq!(parts.classes[0], [binary().parse_word("0").unwrap()]);
        assert_eq!(parts.classes[1], [binary().parse_word("1").unwrap()]);

        let full = forbid(&[]);
        assert_eq!(full.chain_components(2).unwrap().classes.len(), 1);

        // The transient 01 links the fixed points of forbid{10}.
        let no10 = forbid(&["10"]);
        let parts = no10.chain_components(2).unwrap();
        assert_eq!(parts.classes.len(), 1);
        assert_eq!(parts.classes[0].len(), 3);
    }

    #[test]
    fn chain_classes_partition_and_are_closed() {
        for sft in [forbid(&["01", "10"]), forbid(&["10"]), forbid(&["11"]), forbid(&[])] {
            for n in 1..=3 {
                let parts = sft.chain_components(n).unwrap();
                let mut seen = BTreeSet::new();
                for class in &parts.classes {
                    for w in class {
                        assert!(seen.insert(w.clone()), "classes overlap");
                    }
                }
                assert_eq!(seen, sft.language(n), "classes must cover the language");
                // No pruned edge mixes classes.
                let m = n.max(sft.window());
                let big = sft.reblock(m).unwrap();
                for e in &big.edges {
                    let classes: BTreeSet<_> =
                        e.word.windows(n).map(|w| parts.class_of(w).unwrap()).collect();
                    assert_eq!(classes.len(), 1, "edge spans classes");
                }
                // Each component is chain transitive at width n.
                for i in 0..parts.classes.len() {
                    let comp = sft.component_sft(&parts, i).unwrap();
                    assert_eq!(comp.chain_components(n).unwrap().classes.len(), 1);
                }
            }
        }
    }

    #[test]
    fn block_image_and_component_permutation() {
        let ab = binary();
        let fixed = forbid(&["01", "10"]);
        let swap = LocalRule::builtin(Builtin::Swap, ab.clone(), 1).unwrap();
        let ident = LocalRule::builtin(Builtin::Identity, ab.clone(), 1).unwrap();
        let shift = LocalRule::builtin(Builtin::Shift, ab.clone(), 1).unwrap();

        // Swap exchanges the two fixed points; the n-language is unchanged.
        let image = fixed.block_image(&swap, 2).unwrap();
        assert_eq!(image.language(2), fixed.language(2));

        let map = fixed.component_permutation(&swap, 2).unwrap();
        assert_eq!(map.image_class, [Some(1), Some(0)]);
        assert!(map.is_permutation && map.is_cyclic);

        let map = fixed.component_permutation(&ident, 2).unwrap();
        assert_eq!(map.image_class, [Some(0), Some(1)]);
        assert!(map.is_permutation && !map.is_cyclic);

        let map = forbid(&[]).component_permutation(&shift, 2).unwrap();
        assert_eq!(map.image_class, [Some(0)]);
        assert!(map.is_cyclic);

        // Identity preserves the n-language of anything.
        let golden = forbid(&["11"]);
        for n in 2..=4 {
            assert_eq!(golden.block_image(&ident, n).unwrap().language(n), golden.language(n));
            assert_eq!(golden.block_image(&shift, n).unwrap().language(n), golden.language(n));
        }
    }

    #[test]
    fn approximation_and_chain_transitivity() {
        let ab = binary();
        // Language of 0^a 1^b: approximation at 2 forbids exactly 10.
        let zeros_ones: Vec<Vec<Sym>> = (0..=4)
            .flat_map(|k| (0..=k).map(move |a| (a, k - a)))
            .map(|(a, b)| {
                core::iter::repeat(Sym(0)).take(a).chain(core::iter::repeat(Sym(1)).take(b)).collect()
            })
            .collect();
        let sample = LanguageSample::from_words(
            ab.clone(),
            4,
            zeros_ones,
            crate::sample::Provenance::Exact,
        )
        .unwrap();
        let approx = Sft::approximation(&sample, 2).unwrap();
        assert_eq!(approx.pruned_words(), forbid(&["10"]).pruned_words());

        let ct = is_chain_transitive(&sample, 2).unwrap();
        assert!(!ct.holds);
        assert_eq!(ct.first_failure, Some(2));

        let full = LanguageSample::full(ab, 4);
        assert!(is_chain_transitive(&full, 4).unwrap().holds);

        let golden_sample = forbid(&["11"]).language_sample(4).unwrap();
        assert!(is_chain_transitive(&golden_sample, 4).unwrap().holds);
    }

    /// Avoiding the forbidden words plus brute-force bi-directional
    /// extendability, with no reference to the pruned graph.
    fn brute_language(alphabet: &Alphabet, forbidden: &[Vec<Sym>], k: usize, pad: usize) -> BTreeSet<Vec<Sym>> {
        let ok = |w: &[Sym]| {
            !forbidden.iter().any(|f| w.windows(f.len()).any(|p| p == &f[..]))
        };
        alphabet
            .words(k)
            .filter(|w| {
                ok(w)
                    && alphabet.words(pad).any(|left| {
                        alphabet.words(pad).any(|right| {
                            let mut x = left.clone();
                            x.extend_from_slice(w);
                            x.extend_from_slice(&right);
                            ok(&x)
                        })
                    })
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Graph language = brute-force avoid + extendability filter.
        #[test]
        fn prop_language_matches_brute_force(
            raw in proptest::collection::vec(proptest::collection::vec(0u16..2, 1..4), 0..3),
            k in 1usize..6,
        ) {
            let ab = binary();
            let forbidden: Vec<Vec<Sym>> =
                raw.into_iter().map(|w| w.into_iter().map(Sym).collect()).collect();
            let sft = Sft::from_forbidden(ab.clone(), &forbidden).unwrap();
            // Padding of 2 * vertex bound suffices for these sizes.
            let brute = brute_language(&ab, &forbidden, k, 5);
            prop_assert_eq!(sft.language(k), brute);
        }

        /// Every pruned edge word extends legally in both directions well
        /// past the vertex count.
        #[test]
        fn prop_pruned_edges_extend(
            raw in proptest::collection::vec(proptest::collection::vec(0u16..2, 1..4), 0..3),
        ) {
            let ab = binary();
            let forbidden: Vec<Vec<Sym>> =
                raw.into_iter().map(|w| w.into_iter().map(Sym).collect()).collect();
            let sft = Sft::from_forbidden(ab.clone(), &forbidden).unwrap();
            let pad = 2 * sft.vertex_count() + 2;
            let ok = |w: &[Sym]| {
                !forbidden.iter().any(|f| w.windows(f.len()).any(|p| p == &f[..]))
            };
            for word in sft.pruned_words() {
                prop_assert!(
                    extendable(&ab, &word, pad, &ok, true)
                        && extendable(&ab, &word, pad, &ok, false),
                    "pruned word failed to extend"
                );
            }
        }
    }

    /// Depth-first search for a legal extension of length `depth` on one side.
    fn extendable(
        ab: &Alphabet,
        word: &[Sym],
        depth: usize,
        ok: &impl Fn(&[Sym]) -> bool,
        left: bool,
    ) -> bool {
        if depth == 0 {
            return true;
        }
        ab.symbols().any(|s| {
            let mut y;
            if left {
                y = alloc::vec![s];
                y.extend_from_slice(word);
            } else {
                y = word.to_vec();
                y.push(s);
            }
            ok(&y) && extendable(ab, &y, depth - 1, ok, left)
        })
    }
}
