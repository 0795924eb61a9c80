//! Ordered tree edit distance (Zhang and Shasha keyroot dynamic program)
//! with unit insertion and deletion costs.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree<L> {
    pub label: L,
    pub children: Vec<Tree<L>>,
}

impl<L> Tree<L> {
    pub fn leaf(label: L) -> Self {
        Tree {
            label,
            children: Vec::new(),
        }
    }

    pub fn node(label: L, children: Vec<Tree<L>>) -> Self {
        Tree { label, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }
}

struct Postorder<'a, L> {
    labels: Vec<&'a L>,
    /// Postorder index of each node's leftmost leaf descendant.
    leftmost: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a, L> Postorder<'a, L> {
    fn new(tree: &'a Tree<L>) -> Self {
        let mut labels = Vec::new();
        let mut leftmost = Vec::new();
        visit(tree, &mut labels, &mut leftmost);
        let n = labels.len();
        let mut seen = vec![false; n];
        let mut keyroots = Vec::new();
        for i in (0..n).rev() {
            if !seen[leftmost[i]] {
                seen[leftmost[i]] = true;
                keyroots.push(i);
            }
        }
        keyroots.reverse();
        Postorder {
            labels,
            leftmost,
            keyroots,
        }
    }
}

fn visit<'a, L>(tree: &'a Tree<L>, labels: &mut Vec<&'a L>, leftmost: &mut Vec<usize>) -> usize {
    let mut first = None;
    for child in &tree.children {
        let l = visit(child, labels, leftmost);
        first.get_or_insert(l);
    }
    let l = first.unwrap_or(labels.len());
    labels.push(&tree.label);
    leftmost.push(l);
    l
}

/// Minimum cost of turning `a` into `b` by deleting nodes (cost 1),
/// inserting nodes (cost 1) and relabelling nodes (cost `rename`).
pub fn tree_edit_distance<L>(a: &Tree<L>, b: &Tree<L>, rename: impl Fn(&L, &L) -> f64) -> f64 {
    let a = Postorder::new(a);
    let b = Postorder::new(b);
    let (n, m) = (a.labels.len(), b.labels.len());
    let mut td = vec![vec![0.0f64; m]; n];
    let mut fd = vec![vec![0.0f64; m + 1]; n + 1];

    for &i in &a.keyroots {
        for &j in &b.keyroots {
            let (li, lj) = (a.leftmost[i], b.leftmost[j]);
            fd[0][0] = 0.0;
            for x in li..=i {
                fd[x - li + 1][0] = fd[x - li][0] + 1.0;
            }
            for y in lj..=j {
                fd[0][y - lj + 1] = fd[0][y - lj] + 1.0;
            }
            for x in li..=i {
                for y in lj..=j {
                    let (xi, yi) = (x - li + 1, y - lj + 1);
                    let delete = fd[xi - 1][yi] + 1.0;
                    let insert = fd[xi][yi - 1] + 1.0;
                    if a.leftmost[x] == li && b.leftmost[y] == lj {
                        let relabel = fd[xi - 1][yi - 1] + rename(a.labels[x], b.labels[y]);
                        let best = delete.min(insert).min(relabel);
                        fd[xi][yi] = best;
                        td[x][y] = best;
                    } else {
                        let subtree = fd[a.leftmost[x] - li][b.leftmost[y] - lj] + td[x][y];
                        fd[xi][yi] = delete.min(insert).min(subtree);
                    }
                }
            }
        }
    }
    td[n - 1][m - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(a: &char, b: &char) -> f64 {
        if a == b {
            0.0
        } else {
            1.0
        }
    }

    fn t(label: char, children: Vec<Tree<char>>) -> Tree<char> {
        Tree::node(label, children)
    }

    #[test]
    fn classic_example() {
        // f(d(a, c(b)), e) -> f(c(d(a, b)), e) costs 2
        let a = t('f', vec![t('d', vec![Tree::leaf('a'), t('c', vec![Tree::leaf('b')])]), Tree::leaf('e')]);
        let b = t('f', vec![t('c', vec![t('d', vec![Tree::leaf('a'), Tree::leaf('b')])]), Tree::leaf('e')]);
        assert_eq!(tree_edit_distance(&a, &b, unit), 2.0);
        assert_eq!(tree_edit_distance(&b, &a, unit), 2.0);
    }

    #[test]
    fn identity_and_single_nodes() {
        let a = t('a', vec![Tree::leaf('b'), Tree::leaf('c')]);
        assert_eq!(tree_edit_distance(&a, &a, unit), 0.0);
        assert_eq!(tree_edit_distance(&Tree::leaf('a'), &Tree::leaf('b'), unit), 1.0);
        assert_eq!(tree_edit_distance(&a, &Tree::leaf('a'), unit), 2.0);
    }
}
