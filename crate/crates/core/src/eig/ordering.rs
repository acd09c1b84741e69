//! Nested dissection ordering from breadth-first level-set separators.

use alloc::vec::Vec;

/// Parts at or below this size are ordered by reverse Cuthill-McKee.
const LEAF_SIZE: usize = 48;
/// Both halves of a split must hold at least this fraction of the part.
const MIN_BALANCE: f64 = 0.25;

/// Undirected adjacency in compressed form (no self loops).
pub(crate) struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    pub(crate) fn from_edges(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (i, j) in edges {
            if i != j {
                pairs.push((i, j));
                pairs.push((j, i));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut ptr = alloc::vec![0usize; n + 1];
        for &(i, _) in &pairs {
            ptr[i + 1] += 1;
        }
        for i in 0..n {
            ptr[i + 1] += ptr[i];
        }
        Graph {
            ptr,
            adj: pairs.into_iter().map(|p| p.1).collect(),
        }
    }

    fn n(&self) -> usize {
        self.ptr.len() - 1
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }
}

struct Dissector<'g> {
    g: &'g Graph,
    /// Part label of each vertex; only vertices carrying the active label
    /// are visited.
    label: Vec<usize>,
    next_label: usize,
    level: Vec<usize>,
    order: Vec<usize>,
}

/// Fill-reducing permutation: `perm[new] = old`.
pub(crate) fn nested_dissection(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut d = Dissector {
        g,
        label: alloc::vec![0; n],
        next_label: 1,
        level: alloc::vec![usize::MAX; n],
        order: Vec::with_capacity(n),
    };
    let all: Vec<usize> = (0..n).collect();
    d.dissect(all, 0);
    d.order
}

impl Dissector<'_> {
    fn dissect(&mut self, part: Vec<usize>, lbl: usize) {
        if part.is_empty() {
            return;
        }
        // split into connected components first
        let comp = self.bfs_levels(part[0], lbl);
        if comp.iter().map(Vec::len).sum::<usize>() < part.len() {
            let mut seen: Vec<usize> = comp.into_iter().flatten().collect();
            let l1 = self.fresh_label(&seen);
            let rest: Vec<usize> = part.iter().copied().filter(|&v| self.label[v] == lbl).collect();
            let l2 = self.fresh_label(&rest);
            self.dissect(core::mem::take(&mut seen), l1);
            self.dissect(rest, l2);
            return;
        }
        if part.len() <= LEAF_SIZE {
            self.leaf(part, lbl);
            return;
        }
        let levels = self.pseudo_peripheral_levels(part[0], lbl);
        let Some(s) = choose_separator(&levels, part.len()) else {
            self.leaf(part, lbl);
            return;
        };
        let mut sep = levels[s].clone();
        let mut below: Vec<usize> = levels[..s].iter().flatten().copied().collect();
        let above: Vec<usize> = levels[s + 1..].iter().flatten().copied().collect();
        // separator vertices without a neighbour above are not needed
        let la = self.fresh_label(&above);
        sep.retain(|&v| {
            if self.g.neighbors(v).iter().any(|&w| self.label[w] == la) {
                true
            } else {
                below.push(v);
                false
            }
        });
        let lb = self.fresh_label(&below);
        for &v in &sep {
            self.label[v] = usize::MAX;
        }
        self.dissect(below, lb);
        self.dissect(above, la);
        self.order.extend_from_slice(&sep);
    }

    fn fresh_label(&mut self, verts: &[usize]) -> usize {
        let l = self.next_label;
        self.next_label += 1;
        for &v in verts {
            self.label[v] = l;
        }
        l
    }

    /// Level sets of a breadth-first search restricted to label `lbl`.
    fn bfs_levels(&mut self, root: usize, lbl: usize) -> Vec<Vec<usize>> {
        let mut levels: Vec<Vec<usize>> = alloc::vec![alloc::vec![root]];
        let mut visited = alloc::vec![root];
        self.level[root] = 0;
        loop {
            let mut next = Vec::new();
            for &v in levels.last().unwrap() {
                for &w in self.g.neighbors(v) {
                    if self.label[w] == lbl && self.level[w] == usize::MAX {
                        self.level[w] = levels.len();
                        next.push(w);
                        visited.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
        for v in visited {
            self.level[v] = usize::MAX;
        }
        levels
    }

    fn pseudo_peripheral_levels(&mut self, start: usize, lbl: usize) -> Vec<Vec<usize>> {
        let mut levels = self.bfs_levels(start, lbl);
        for _ in 0..6 {
            let last = levels.last().unwrap();
            let cand = *last
                .iter()
                .min_by_key(|&&v| self.g.neighbors(v).iter().filter(|&&w| self.label[w] == lbl).count())
                .unwrap();
            let trial = self.bfs_levels(cand, lbl);
            if trial.len() <= levels.len() {
                break;
            }
            levels = trial;
        }
        levels
    }

    /// Reverse Cuthill-McKee on a small connected part.
    fn leaf(&mut self, part: Vec<usize>, lbl: usize) {
        let levels = self.pseudo_peripheral_levels(part[0], lbl);
        let mut local: Vec<usize> = Vec::with_capacity(part.len());
        for lev in levels {
            let mut lev = lev;
            lev.sort_by_key(|&v| self.g.neighbors(v).len());
            local.extend(lev);
        }
        for &v in &local {
            self.label[v] = usize::MAX;
        }
        self.order.extend(local.into_iter().rev());
    }
}

/// Smallest level whose removal leaves both sides above the balance floor.
fn choose_separator(levels: &[Vec<usize>], total: usize) -> Option<usize> {
    if levels.len() < 3 {
        return None;
    }
    let floor = (MIN_BALANCE * total as f64) as usize;
    let mut best: Option<(usize, usize)> = None;
    let mut below = 0usize;
    for (s, lev) in levels.iter().enumerate() {
        let above = total - below - lev.len();
        if s > 0 && s + 1 < levels.len() && below >= floor && above >= floor {
            let key = lev.len();
            if best.is_none_or(|(_, k)| key < k) {
                best = Some((s, key));
            }
        }
        below += lev.len();
    }
    best.map(|b| b.0).or_else(|| {
        // fall back to the median level
        let mut acc = 0;
        for (s, lev) in levels.iter().enumerate() {
            acc += lev.len();
            if 2 * acc >= total {
                return Some(s.clamp(1, levels.len() - 2));
            }
        }
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Graph {
        let id = |i: usize, j: usize| i * n + j;
        let mut e = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i + 1 < n {
                    e.push((id(i, j), id(i + 1, j)));
                }
                if j + 1 < n {
                    e.push((id(i, j), id(i, j + 1)));
                }
            }
        }
        Graph::from_edges(n * n, e.into_iter())
    }

    #[test]
    fn permutation_is_bijective() {
        for n in [1, 3, 10, 40] {
            let p = nested_dissection(&grid(n));
            let mut s = p.clone();
            s.sort_unstable();
            assert_eq!(s, (0..n * n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn disconnected_graph() {
        let g = Graph::from_edges(6, [(0, 1), (2, 3)].into_iter());
        let mut p = nested_dissection(&g);
        p.sort_unstable();
        assert_eq!(p, (0..6).collect::<Vec<_>>());
    }
}
