//! Graphical models, chordal completions and junction trees.
//!
//! Vertices are the 1-based variable labels `1..=d`. A junction tree arranges
//! the maximal cliques of a chordal completion so that the clique-intersection
//! property holds; its running-intersection ordering drives the factorization
//! used by the rational Christoffel function.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// An undirected graph over variables `1..=d` encoding conditional
/// independence structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicalModel {
    num_vars: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl GraphicalModel {
    /// Build a graph, validating that endpoints are in `1..=num_vars` and
    /// there are no self-loops. Edge direction and duplicates are normalized.
    pub fn new(num_vars: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidArgument(
                "graph needs at least one variable".into(),
            ));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if u == 0 || v == 0 || u > num_vars || v > num_vars {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range 1..={num_vars}"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(GraphicalModel {
            num_vars,
            edges: set,
        })
    }

    /// Graph with no edges (a product structure).
    pub fn empty(num_vars: usize) -> Self {
        GraphicalModel::new(num_vars, []).expect("empty graph is valid for d >= 1")
    }

    /// Path graph `1 - 2 - ... - d`.
    pub fn chain(num_vars: usize) -> Self {
        GraphicalModel::new(num_vars, (1..num_vars).map(|i| (i, i + 1)))
            .expect("chain graph is valid")
    }

    /// Complete graph on `1..=d`.
    pub fn complete(num_vars: usize) -> Self {
        let edges = (1..=num_vars)
            .flat_map(|u| ((u + 1)..=num_vars).map(move |v| (u, v)));
        GraphicalModel::new(num_vars, edges).expect("complete graph is valid")
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.num_vars + 1];
        for &(u, v) in &self.edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }

    /// Parse the text format: first line `d`, then one `u v` pair per line
    /// (1-based). Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let first = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let d: usize = first
            .parse()
            .map_err(|_| Error::Parse(format!("expected vertex count, got {first:?}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            let u = it.next().and_then(|t| t.parse::<usize>().ok());
            let v = it.next().and_then(|t| t.parse::<usize>().ok());
            match (u, v, it.next()) {
                (Some(u), Some(v), None) => edges.push((u, v)),
                _ => return Err(Error::Parse(format!("bad edge line {line:?}"))),
            }
        }
        GraphicalModel::new(d, edges)
    }

    /// Read a graph from a file in the [`GraphicalModel::parse`] format.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        GraphicalModel::parse(&std::fs::read_to_string(path)?)
    }

    /// Maximum cardinality search. Returns the visit order; the reverse visit
    /// order is a perfect elimination ordering exactly when the graph is chordal.
    fn mcs_order(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let d = self.num_vars;
        let mut visited = vec![false; d + 1];
        let mut weight = vec![0usize; d + 1];
        let mut order = Vec::with_capacity(d);
        for _ in 0..d {
            let v = (1..=d)
                .filter(|&v| !visited[v])
                .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
                .expect("unvisited vertex exists");
            visited[v] = true;
            order.push(v);
            for &w in &adj[v] {
                if !visited[w] {
                    weight[w] += 1;
                }
            }
        }
        order
    }

    /// Chordality test via maximum cardinality search and the perfect
    /// elimination check of the resulting order.
    pub fn is_chordal(&self) -> bool {
        let adj = self.adjacency();
        let order = self.mcs_order();
        let mut position = vec![usize::MAX; self.num_vars + 1];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        for (i, &v) in order.iter().enumerate() {
            let earlier: Vec<usize> = adj[v].iter().copied().filter(|&w| position[w] < i).collect();
            let Some(&parent) = earlier.iter().max_by_key(|&&w| position[w]) else {
                continue;
            };
            for &w in &earlier {
                if w != parent && !adj[parent].contains(&w) {
                    return false;
                }
            }
        }
        true
    }

    /// Greedy min-fill chordal completion.
    ///
    /// Repeatedly eliminates the vertex whose elimination creates the fewest
    /// fill edges, breaking ties by smallest vertex index, and adds those fill
    /// edges to the graph. Returns the completed graph together with the added
    /// edges. Already-chordal graphs come back unchanged.
    pub fn chordal_completion(&self) -> (GraphicalModel, Vec<(usize, usize)>) {
        let d = self.num_vars;
        let mut adj = self.adjacency();
        let mut remaining: BTreeSet<usize> = (1..=d).collect();
        let mut added: Vec<(usize, usize)> = Vec::new();

        while !remaining.is_empty() {
            let fill_count = |v: usize, adj: &[BTreeSet<usize>]| -> usize {
                let nb: Vec<usize> = adj[v].iter().copied().collect();
                let mut count = 0;
                for (i, &a) in nb.iter().enumerate() {
                    for &b in &nb[i + 1..] {
                        if !adj[a].contains(&b) {
                            count += 1;
                        }
                    }
                }
                count
            };
            let v = remaining
                .iter()
                .copied()
                .min_by_key(|&v| (fill_count(v, &adj), v))
                .expect("remaining is nonempty");
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if !adj[a].contains(&b) {
                        adj[a].insert(b);
                        adj[b].insert(a);
                        added.push((a.min(b), a.max(b)));
                    }
                }
            }
            for &w in &nb {
                adj[w].remove(&v);
            }
            adj[v].clear();
            remaining.remove(&v);
        }

        added.sort_unstable();
        let completed = GraphicalModel::new(
            d,
            self.edges.iter().copied().chain(added.iter().copied()),
        )
        .expect("completion preserves validity");
        debug_assert!(completed.is_chordal());
        (completed, added)
    }

    /// Maximal cliques of a chordal graph, each sorted ascending, the list
    /// sorted lexicographically. Errors when the graph is not chordal.
    fn maximal_cliques(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_chordal() {
            return Err(Error::NotChordal);
        }
        let adj = self.adjacency();
        let order = self.mcs_order();
        let mut position = vec![usize::MAX; self.num_vars + 1];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        // every maximal clique arises as a vertex plus its earlier neighbours
        let mut candidates: Vec<BTreeSet<usize>> = Vec::new();
        for (i, &v) in order.iter().enumerate() {
            let mut clique: BTreeSet<usize> =
                adj[v].iter().copied().filter(|&w| position[w] < i).collect();
            clique.insert(v);
            candidates.push(clique);
        }
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        for (i, c) in candidates.iter().enumerate() {
            let dominated = candidates
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && c.is_subset(other) && (c.len() < other.len() || j < i));
            if !dominated {
                cliques.push(c.iter().copied().collect());
            }
        }
        cliques.sort();
        cliques.dedup();
        Ok(cliques)
    }
}

/// The maximal cliques of a chordal completion arranged in a tree with the
/// clique-intersection property, ordered so that the running intersection
/// property holds with `parent(k)` as the witness.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionTree {
    num_vars: usize,
    /// Cliques in running-intersection order, each sorted ascending.
    cliques: Vec<Vec<usize>>,
    /// Tree edges as clique index pairs `(i, j)`, `i < j`.
    tree_edges: Vec<(usize, usize)>,
    /// `parent[k]` for `k >= 1`; `parent[0]` is `None` (the root).
    parent: Vec<Option<usize>>,
    /// `separators[k] = cliques[k] ∩ cliques[parent[k]]`; empty for the root.
    separators: Vec<Vec<usize>>,
    /// Fill-in edges of the chordal completion that produced the cliques.
    added_edges: Vec<(usize, usize)>,
    /// Size of the largest clique.
    clique_number: usize,
}

impl JunctionTree {
    /// Junction tree of an already-chordal graph. Errors with
    /// [`Error::NotChordal`] otherwise.
    pub fn from_chordal(graph: &GraphicalModel) -> Result<Self> {
        let cliques = graph.maximal_cliques()?;
        let tree = Self::assemble(graph.num_vars(), cliques, Vec::new())?;
        debug_assert!(tree.verify_running_intersection());
        Ok(tree)
    }

    /// Chordal completion followed by junction tree construction. This is the
    /// entry point for arbitrary graphical models.
    pub fn build(graph: &GraphicalModel) -> Result<Self> {
        let (completed, added) = graph.chordal_completion();
        let cliques = completed.maximal_cliques()?;
        let tree = Self::assemble(graph.num_vars(), cliques, added)?;
        debug_assert!(tree.verify_running_intersection());
        Ok(tree)
    }

    /// Build a junction tree from an explicitly supplied clique list, for
    /// callers that want a specific factorization rather than the min-fill
    /// heuristic. The cliques must cover every variable and admit a tree with
    /// the clique-intersection property.
    pub fn from_cliques(num_vars: usize, cliques: Vec<Vec<usize>>) -> Result<Self> {
        if cliques.is_empty() {
            return Err(Error::InvalidArgument("clique list is empty".into()));
        }
        let mut covered = vec![false; num_vars + 1];
        let mut normalized = Vec::with_capacity(cliques.len());
        for mut c in cliques {
            c.sort_unstable();
            c.dedup();
            if c.is_empty() {
                return Err(Error::InvalidArgument("empty clique".into()));
            }
            if c[0] == 0 || *c.last().unwrap() > num_vars {
                return Err(Error::InvalidArgument(format!(
                    "clique {c:?} out of range 1..={num_vars}"
                )));
            }
            for &v in &c {
                covered[v] = true;
            }
            normalized.push(c);
        }
        if let Some(missing) = (1..=num_vars).find(|&v| !covered[v]) {
            return Err(Error::InvalidArgument(format!(
                "variable {missing} is not covered by any clique"
            )));
        }
        normalized.sort();
        normalized.dedup();
        let tree = Self::assemble(num_vars, normalized, Vec::new())?;
        if !tree.verify_clique_intersection() || !tree.verify_running_intersection() {
            return Err(Error::InvalidArgument(
                "clique list admits no tree with the clique-intersection property".into(),
            ));
        }
        Ok(tree)
    }

    /// Rebuild a tree from stored parts (model files), recomputing separators
    /// and validating the running intersection property.
    pub(crate) fn from_parts(
        num_vars: usize,
        cliques: Vec<Vec<usize>>,
        parents: Vec<Option<usize>>,
        added_edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if cliques.is_empty() || parents.len() != cliques.len() || parents[0].is_some() {
            return Err(Error::InvalidArgument("malformed clique tree parts".into()));
        }
        if cliques
            .iter()
            .any(|c| c.is_empty() || c.windows(2).any(|w| w[0] >= w[1]))
        {
            return Err(Error::InvalidArgument(
                "cliques must be nonempty and strictly sorted".into(),
            ));
        }
        let mut tree_edges = Vec::new();
        let mut separators = vec![Vec::new(); cliques.len()];
        for (k, parent) in parents.iter().enumerate().skip(1) {
            let p = parent.ok_or_else(|| {
                Error::InvalidArgument(format!("clique {k} has no parent"))
            })?;
            if p >= k {
                return Err(Error::InvalidArgument(format!(
                    "parent {p} of clique {k} does not precede it"
                )));
            }
            separators[k] = cliques[k]
                .iter()
                .copied()
                .filter(|v| cliques[p].binary_search(v).is_ok())
                .collect();
            tree_edges.push((p, k));
        }
        tree_edges.sort_unstable();
        let clique_number = cliques.iter().map(Vec::len).max().unwrap_or(0);
        let tree = JunctionTree {
            num_vars,
            cliques,
            tree_edges,
            parent: parents,
            separators,
            added_edges,
            clique_number,
        };
        if !tree.verify_running_intersection() {
            return Err(Error::InvalidArgument(
                "clique tree violates the running intersection property".into(),
            ));
        }
        Ok(tree)
    }

    /// Arrange cliques into a maximum-weight spanning tree of the
    /// clique-intersection graph (weights `|Cᵢ ∩ Cⱼ|`, Kruskal with
    /// lexicographic tie-breaking), then order by breadth-first traversal from
    /// the lexicographically smallest clique so parents precede children.
    fn assemble(
        num_vars: usize,
        cliques: Vec<Vec<usize>>,
        added_edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let count = cliques.len();
        debug_assert!(count >= 1);

        let intersection = |a: &[usize], b: &[usize]| -> Vec<usize> {
            a.iter().copied().filter(|v| b.binary_search(v).is_ok()).collect()
        };

        // Kruskal, maximizing |intersection|; zero-weight edges keep isolated
        // components attached.
        let mut candidate_edges: Vec<(usize, usize, usize)> = Vec::new();
        for i in 0..count {
            for j in (i + 1)..count {
                let w = intersection(&cliques[i], &cliques[j]).len();
                candidate_edges.push((w, i, j));
            }
        }
        candidate_edges.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut component: Vec<usize> = (0..count).collect();
        fn find(component: &mut Vec<usize>, mut x: usize) -> usize {
            while component[x] != x {
                component[x] = component[component[x]];
                x = component[x];
            }
            x
        }
        let mut adjacency = vec![Vec::new(); count];
        let mut taken = 0;
        for (_, i, j) in candidate_edges {
            let (ri, rj) = (find(&mut component, i), find(&mut component, j));
            if ri != rj {
                component[ri] = rj;
                adjacency[i].push(j);
                adjacency[j].push(i);
                taken += 1;
                if taken + 1 == count {
                    break;
                }
            }
        }

        // breadth-first order from the lexicographically smallest clique
        let mut order = Vec::with_capacity(count);
        let mut parent_old = vec![None; count];
        let mut seen = vec![false; count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut next: Vec<usize> = adjacency[i].iter().copied().filter(|&j| !seen[j]).collect();
            next.sort_unstable();
            for j in next {
                seen[j] = true;
                parent_old[j] = Some(i);
                queue.push_back(j);
            }
        }
        debug_assert_eq!(order.len(), count);

        let mut new_index = vec![0usize; count];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let cliques_ordered: Vec<Vec<usize>> = order.iter().map(|&o| cliques[o].clone()).collect();
        let mut parent: Vec<Option<usize>> = vec![None; count];
        let mut separators: Vec<Vec<usize>> = vec![Vec::new(); count];
        let mut tree_edges = Vec::with_capacity(count.saturating_sub(1));
        for k in 1..count {
            let p = new_index[parent_old[order[k]].expect("non-root has a parent")];
            parent[k] = Some(p);
            separators[k] = intersection(&cliques_ordered[k], &cliques_ordered[p]);
            tree_edges.push((p.min(k), p.max(k)));
        }
        tree_edges.sort_unstable();

        let clique_number = cliques_ordered.iter().map(Vec::len).max().unwrap_or(0);
        Ok(JunctionTree {
            num_vars,
            cliques: cliques_ordered,
            tree_edges,
            parent,
            separators,
            added_edges,
            clique_number,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    /// Separator of clique `k` towards its parent; empty for the root and for
    /// cliques in other connected components of the original graph.
    pub fn separators(&self) -> &[Vec<usize>] {
        &self.separators
    }

    pub fn parent(&self, k: usize) -> Option<usize> {
        self.parent.get(k).copied().flatten()
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn added_edges(&self) -> &[(usize, usize)] {
        &self.added_edges
    }

    /// Size of the largest clique.
    pub fn clique_number(&self) -> usize {
        self.clique_number
    }

    /// `clique_number - 1`, an upper bound on the treewidth of the graph the
    /// completion came from.
    pub fn treewidth_upper_bound(&self) -> usize {
        self.clique_number.saturating_sub(1)
    }

    /// Exhaustive check of the clique-intersection property: for every pair of
    /// cliques, every clique on the tree path between them contains their
    /// intersection.
    pub fn verify_clique_intersection(&self) -> bool {
        let count = self.cliques.len();
        let mut adjacency = vec![Vec::new(); count];
        for &(i, j) in &self.tree_edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for a in 0..count {
            // BFS tree rooted at a to recover paths
            let mut pred = vec![usize::MAX; count];
            pred[a] = a;
            let mut queue = VecDeque::from([a]);
            while let Some(x) = queue.pop_front() {
                for &y in &adjacency[x] {
                    if pred[y] == usize::MAX {
                        pred[y] = x;
                        queue.push_back(y);
                    }
                }
            }
            for b in (a + 1)..count {
                if pred[b] == usize::MAX {
                    return false; // not a tree on the cliques
                }
                let inter: Vec<usize> = self.cliques[a]
                    .iter()
                    .copied()
                    .filter(|v| self.cliques[b].binary_search(v).is_ok())
                    .collect();
                let mut c = b;
                while c != a {
                    if inter
                        .iter()
                        .any(|v| self.cliques[c].binary_search(v).is_err())
                    {
                        return false;
                    }
                    c = pred[c];
                }
            }
        }
        true
    }

    /// Check the running-intersection property of the stored order: each
    /// clique's intersection with the union of all earlier cliques lies inside
    /// its parent.
    pub fn verify_running_intersection(&self) -> bool {
        let mut earlier: BTreeSet<usize> = self.cliques[0].iter().copied().collect();
        for k in 1..self.cliques.len() {
            let Some(p) = self.parent[k] else {
                return false;
            };
            if p >= k || !self.tree_edges.contains(&(p.min(k), p.max(k))) {
                return false;
            }
            for &v in &self.cliques[k] {
                if earlier.contains(&v) && self.cliques[p].binary_search(&v).is_err() {
                    return false;
                }
            }
            let expected: Vec<usize> = self.cliques[k]
                .iter()
                .copied()
                .filter(|v| self.cliques[p].binary_search(v).is_ok())
                .collect();
            if expected != self.separators[k] {
                return false;
            }
            earlier.extend(self.cliques[k].iter().copied());
        }
        earlier.len() == self.num_vars
    }

    /// `Σ|C_k| - Σ|S_k|`, which equals the number of variables for a valid
    /// junction tree.
    pub fn variable_count_identity(&self) -> (usize, usize) {
        let c: usize = self.cliques.iter().map(Vec::len).sum();
        let s: usize = self.separators.iter().map(Vec::len).sum();
        (c, s)
    }

    /// Graphviz rendering with cliques as nodes and separators as edge labels.
    pub fn to_dot(&self) -> String {
        fn label(vars: &[usize]) -> String {
            let inner: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", inner.join(","))
        }
        let mut out = String::from("graph junction_tree {\n  node [shape=ellipse];\n");
        for (k, c) in self.cliques.iter().enumerate() {
            let _ = writeln!(out, "  c{k} [label=\"{}\"];", label(c));
        }
        for &(i, j) in &self.tree_edges {
            let sep = if self.parent(j) == Some(i) {
                label(&self.separators[j])
            } else {
                label(&self.separators[i])
            };
            let _ = writeln!(out, "  c{i} -- c{j} [label=\"{sep}\"];");
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// The seven-vertex example: a five-cycle 3-4-7-6-3 closed through 3, with
    /// a pendant path 1-2-3 and a pendant vertex 5 on 2.
    fn seven_vertex_graph() -> GraphicalModel {
        GraphicalModel::new(
            7,
            [(1, 2), (2, 3), (3, 4), (4, 7), (7, 6), (6, 3), (2, 5)],
        )
        .unwrap()
    }

    #[test]
    fn completion_of_seven_vertex_graph_adds_one_edge() {
        let g = seven_vertex_graph();
        let (completed, added) = g.chordal_completion();
        assert_eq!(added, vec![(4, 6)]);
        assert!(completed.is_chordal());
        assert_eq!(completed.num_edges(), g.num_edges() + 1);
    }

    #[test]
    fn junction_tree_of_seven_vertex_graph() {
        let tree = JunctionTree::build(&seven_vertex_graph()).unwrap();
        let mut cliques = tree.cliques().to_vec();
        cliques.sort();
        assert_eq!(
            cliques,
            vec![
                vec![1, 2],
                vec![2, 3],
                vec![2, 5],
                vec![3, 4, 6],
                vec![4, 6, 7]
            ]
        );
        assert_eq!(tree.clique_number(), 3);
        assert_eq!(tree.treewidth_upper_bound(), 2);
        assert!(tree.verify_clique_intersection());
        assert!(tree.verify_running_intersection());
        let (c, s) = tree.variable_count_identity();
        assert_eq!(c - s, 7);
    }

    #[test]
    fn chain_is_already_chordal() {
        let g = GraphicalModel::chain(6);
        assert!(g.is_chordal());
        let (_, added) = g.chordal_completion();
        assert!(added.is_empty());
        let tree = JunctionTree::build(&g).unwrap();
        assert_eq!(tree.cliques().len(), 5);
        for c in tree.cliques() {
            assert_eq!(c.len(), 2);
        }
        for s in &tree.separators()[1..] {
            assert_eq!(s.len(), 1);
        }
        assert_eq!(tree.clique_number(), 2);
    }

    #[test]
    fn single_edge_graph_has_one_clique() {
        let g = GraphicalModel::new(2, [(1, 2)]).unwrap();
        let tree = JunctionTree::build(&g).unwrap();
        assert_eq!(tree.cliques(), &[vec![1, 2]]);
        assert!(tree.tree_edges().is_empty());
        assert!(tree.separators()[0].is_empty());
    }

    #[test]
    fn four_cycle_gets_one_diagonal() {
        let g = GraphicalModel::new(4, [(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        assert!(!g.is_chordal());
        let (completed, added) = g.chordal_completion();
        assert_eq!(added.len(), 1, "one chord suffices for a 4-cycle");
        assert!(added[0] == (1, 3) || added[0] == (2, 4));
        assert!(completed.is_chordal());
        // min-fill with lowest-index tie-breaking eliminates vertex 1 first,
        // connecting its neighbours 2 and 4
        assert_eq!(added[0], (2, 4));
    }

    #[test]
    fn isolated_vertices_become_singleton_cliques() {
        let g = GraphicalModel::new(4, [(1, 2)]).unwrap();
        let tree = JunctionTree::build(&g).unwrap();
        let mut cliques = tree.cliques().to_vec();
        cliques.sort();
        assert_eq!(cliques, vec![vec![1, 2], vec![3], vec![4]]);
        // separators across components are empty
        assert!(tree.separators()[1..].iter().all(Vec::is_empty));
        let (c, s) = tree.variable_count_identity();
        assert_eq!(c - s, 4);
        assert!(tree.verify_running_intersection());
    }

    #[test]
    fn clique_intersection_detects_bad_tree() {
        // path {1,2} - {3,4} - {2,3} violates the property: 2 lies in both end
        // cliques but not in the middle one
        let tree = JunctionTree {
            num_vars: 4,
            cliques: vec![vec![1, 2], vec![3, 4], vec![2, 3]],
            tree_edges: vec![(0, 1), (1, 2)],
            parent: vec![None, Some(0), Some(1)],
            separators: vec![vec![], vec![], vec![3]],
            added_edges: vec![],
            clique_number: 2,
        };
        assert!(!tree.verify_clique_intersection());
    }

    #[test]
    fn star_of_cliques_sharing_a_variable() {
        let tree = JunctionTree::from_cliques(
            4,
            vec![vec![1, 2], vec![2, 3], vec![2, 4]],
        )
        .unwrap();
        assert!(tree.verify_clique_intersection());
        assert_eq!(tree.clique_number(), 2);
    }

    #[test]
    fn explicit_cliques_must_cover_all_variables() {
        let err = JunctionTree::from_cliques(3, vec![vec![1, 2]]).unwrap_err();
        assert!(err.to_string().contains("not covered"));
    }

    #[test]
    fn explicit_cliques_without_junction_tree_are_rejected() {
        // pairwise intersections of these cliques cannot satisfy the
        // clique-intersection property on any tree
        let result = JunctionTree::from_cliques(
            4,
            vec![vec![1, 2], vec![2, 3], vec![3, 4], vec![1, 4]],
        );
        assert!(result.is_err());
    }

    fn random_graph(rng: &mut StdRng, d: usize, p: f64) -> GraphicalModel {
        let mut edges = Vec::new();
        for u in 1..=d {
            for v in (u + 1)..=d {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        GraphicalModel::new(d, edges).unwrap()
    }

    #[test]
    fn random_graphs_complete_and_arrange_correctly() {
        let mut rng = StdRng::seed_from_u64(20240817);
        for trial in 0..1000 {
            let d = rng.random_range(1..=10);
            let p = rng.random_range(0.0..1.0);
            let g = random_graph(&mut rng, d, p);
            let (completed, added) = g.chordal_completion();
            assert!(completed.is_chordal(), "trial {trial}");
            if g.is_chordal() {
                assert!(added.is_empty(), "trial {trial}: chordal input refilled");
            }
            let tree = JunctionTree::build(&g).unwrap();
            assert!(tree.verify_clique_intersection(), "trial {trial}");
            assert!(tree.verify_running_intersection(), "trial {trial}");
            let (c, s) = tree.variable_count_identity();
            assert_eq!(c - s, d, "trial {trial}");
            assert!(tree.cliques().len() <= d, "trial {trial}");
        }
    }

    #[test]
    fn graph_file_round_trip() {
        let text = "7\n1 2\n2 3\n3 4\n4 7\n7 6\n6 3\n2 5\n";
        let g = GraphicalModel::parse(text).unwrap();
        assert_eq!(g, seven_vertex_graph());
        assert!(GraphicalModel::parse("").is_err());
        assert!(GraphicalModel::parse("3\n1 2 3\n").is_err());
        assert!(GraphicalModel::parse("3\n1 5\n").is_err());
        assert!(GraphicalModel::parse("x\n").is_err());
    }

    #[test]
    fn dot_output_mentions_every_clique() {
        let tree = JunctionTree::build(&seven_vertex_graph()).unwrap();
        let dot = tree.to_dot();
        for c in tree.cliques() {
            let label: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            assert!(dot.contains(&format!("{{{}}}", label.join(","))));
        }
    }
}
