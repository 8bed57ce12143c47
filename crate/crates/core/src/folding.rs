//! Stallings folding over a symmetric alphabet where letter `x` has inverse `x ^ 1`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use petgraph::unionfind::UnionFind;

/// Free reduction over the `x ^ 1` pairing.
pub fn reduce(word: impl IntoIterator<Item = u8>) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::new();
    for x in word {
        if out.last() == Some(&(x ^ 1)) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inverse(word: &[u8]) -> Vec<u8> {
    word.iter().rev().map(|x| x ^ 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedGraph {
    /// `out[v][x]` is the end of the `x`-edge leaving `v`.
    out: Vec<BTreeMap<u8, usize>>,
    root: usize,
    folded: bool,
}

struct Folder {
    out: Vec<BTreeMap<u8, usize>>,
    uf: UnionFind<usize>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn vertex(&mut self) -> usize {
        self.out.push(BTreeMap::new());
        self.uf.new_set()
    }

    fn half_edge(&mut self, u: usize, x: u8, v: usize) {
        let u = self.uf.find_mut(u);
        match self.out[u].get(&x) {
            Some(&t) => self.pending.push((t, v)),
            None => {
                self.out[u].insert(x, v);
            }
        }
    }

    fn edge(&mut self, u: usize, x: u8, v: usize) {
        self.half_edge(u, x, v);
        self.half_edge(v, x ^ 1, u);
    }

    fn run(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.uf.find_mut(a), self.uf.find_mut(b));
            if a == b {
                continue;
            }
            self.uf.union(a, b);
            let r = self.uf.find_mut(a);
            let gone = if r == a { b } else { a };
            let moved = std::mem::take(&mut self.out[gone]);
            for (x, t) in moved {
                self.half_edge(r, x, t);
            }
        }
    }
}

/// Fold the bouquet of the given words, based at the root.
pub fn fold(words: &[Vec<u8>]) -> FoldedGraph {
    let mut f = Folder {
        out: Vec::new(),
        uf: UnionFind::new(0),
        pending: Vec::new(),
    };
    let root = f.vertex();
    for w in words {
        let w = reduce(w.iter().copied());
        if w.is_empty() {
            continue;
        }
        let mut u = root;
        for (i, &x) in w.iter().enumerate() {
            let v = if i + 1 == w.len() { root } else { f.vertex() };
            f.edge(u, x, v);
            u = v;
        }
        f.run();
    }
    f.run();
    // Compact to surviving vertices, root first.
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let root_rep = f.uf.find_mut(root);
    ids.insert(root_rep, 0);
    let mut order = vec![root_rep];
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        let targets: Vec<usize> = f.out[u].values().copied().collect();
        for t in targets {
            let t = f.uf.find_mut(t);
            if !ids.contains_key(&t) {
                ids.insert(t, order.len());
                order.push(t);
            }
        }
        i += 1;
    }
    let out = order
        .iter()
        .map(|&u| {
            f.out[u]
                .clone()
                .into_iter()
                .map(|(x, t)| (x, ids[&f.uf.find_mut(t)]))
                .collect()
        })
        .collect();
    FoldedGraph {
        out,
        root: 0,
        folded: true,
    }
}

impl FoldedGraph {
    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn is_folded(&self) -> bool {
        self.folded
    }

    /// Rank of the subgroup read by the graph.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }
}

/// A breadth-first spanning tree of a folded graph and the free basis of its
/// subgroup read off the remaining edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    /// Shortlex-least geodesic from the root to each vertex.
    pub tree: Vec<Vec<u8>>,
    /// Basis words, one per positively labelled non-tree edge.
    pub words: Vec<Vec<u8>>,
    /// Basis letter read along each non-tree half-edge.
    label: HashMap<(usize, u8), u8>,
}

impl FoldedGraph {
    /// Follow `w` from the root as far as the graph allows. Returns the vertex
    /// reached and the number of letters read.
    pub fn read(&self, w: &[u8]) -> (usize, usize) {
        let mut v = self.root;
        for (i, x) in w.iter().enumerate() {
            match self.out[v].get(x) {
                Some(&t) => v = t,
                None => return (v, i),
            }
        }
        (v, w.len())
    }

    pub fn basis(&self) -> Basis {
        let n = self.out.len();
        let mut tree: Vec<Option<Vec<u8>>> = vec![None; n];
        let mut parent: Vec<Option<(usize, u8)>> = vec![None; n];
        tree[self.root] = Some(Vec::new());
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            for (&x, &t) in &self.out[u] {
                if tree[t].is_none() {
                    let mut w = tree[u].clone().expect("visited");
                    w.push(x);
                    tree[t] = Some(w);
                    parent[t] = Some((u, x));
                    queue.push_back(t);
                }
            }
        }
        let tree: Vec<Vec<u8>> = tree.into_iter().map(|t| t.expect("folded graphs are connected")).collect();
        let mut words = Vec::new();
        let mut label = HashMap::new();
        for (u, edges) in self.out.iter().enumerate() {
            for (&x, &t) in edges.iter().filter(|(x, _)| *x % 2 == 0) {
                if parent[t] == Some((u, x)) || parent[u] == Some((t, x ^ 1)) {
                    continue;
                }
                let y = 2 * words.len() as u8;
                label.insert((u, x), y);
                label.insert((t, x ^ 1), y ^ 1);
                words.push(reduce(tree[u].iter().copied().chain([x]).chain(inverse(&tree[t]))));
            }
        }
        Basis { tree, words, label }
    }
}

impl Basis {
    /// Spell a closed path from the root in basis letters.
    pub fn spell(&self, g: &FoldedGraph, w: &[u8]) -> Option<Vec<u8>> {
        let mut v = g.root;
        let mut out = Vec::new();
        for x in reduce(w.iter().copied()) {
            if let Some(&y) = self.label.get(&(v, x)) {
                out.push(y);
            }
            v = *g.out[v].get(&x)?;
        }
        (v == g.root).then(|| reduce(out))
    }
}

pub fn folded_member(g: &FoldedGraph, w: &[u8]) -> bool {
    let mut v = g.root;
    for x in reduce(w.iter().copied()) {
        match g.out[v].get(&x) {
            Some(&t) => v = t,
            None => return false,
        }
    }
    v == g.root
}

#[cfg(test)]
mod tests {
    use super::*;

    // a = 0, A = 1, b = 2, B = 3
    #[test]
    fn examples() {
        let g = fold(&[vec![0], vec![2]]);
        assert!(folded_member(&g, &[0, 2]));
        let g = fold(&[vec![0, 0]]);
        assert!(!folded_member(&g, &[0]));
        assert!(folded_member(&g, &[1, 1]));
    }

    #[test]
    fn folding_identifies_shared_prefixes() {
        let g = fold(&[vec![0, 2], vec![0, 3]]);
        assert!(g.is_folded());
        assert_eq!(g.rank(), 2);
        assert!(folded_member(&g, &[0, 2, 2, 1]));
        assert!(!folded_member(&g, &[0, 0, 2, 2]));
    }

    #[test]
    fn basis_of_index_two_subgroup() {
        // a, bab⁻¹, b²
        let g = fold(&[vec![0], vec![2, 0, 3], vec![2, 2]]);
        let basis = g.basis();
        assert_eq!(basis.tree, vec![vec![], vec![2]]);
        assert_eq!(basis.words, vec![vec![0], vec![2, 0, 3], vec![2, 2]]);
        assert_eq!(basis.spell(&g, &[2, 2, 0]), Some(vec![4, 0]));
        assert_eq!(basis.spell(&g, &[2]), None);
        assert_eq!(g.read(&[2, 0, 1, 0]), (1, 4));
    }
}
