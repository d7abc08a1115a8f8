use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{Affine, Ifs, Interval, Word};

struct Node {
    lower: f64,
    word: Word,
    map: Affine,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // reversed: BinaryHeap pops the smallest lower bound, then the smallest word
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then_with(|| other.word.cmp(&self.word))
    }
}

/// Interval containing `d(x, F)` of width at most `tol`.
///
/// Best-first branch and bound over cylinders: `d(x, J_w)` bounds `d(x, F_w)` from below and
/// the image of the anchor point of `F` under `S_w` bounds it from above.
pub fn distance_to_f(ifs: &Ifs, x: &[f64], tol: f64) -> Interval {
    assert!(tol > 0.0, "distance tolerance must be positive");
    let d = ifs.dim();
    let cube = ifs.cube();
    let anchor = ifs.anchor();
    let mut local = vec![0.0; d];
    let mut img = vec![0.0; d];
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
    };

    let root = Affine::identity(d);
    let mut upper = dist(x, anchor);
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        lower: cube.distance_to(x),
        word: Word::empty(),
        map: root,
    });
    while let Some(node) = heap.pop() {
        if upper - node.lower <= tol {
            return Interval::new(node.lower.min(upper), upper);
        }
        for (j, a) in ifs.affines().iter().enumerate() {
            let map = node.map.then_inner(a);
            map.invert_into(x, &mut local);
            let lower = map.ratio * cube.distance_to(&local);
            map.apply_into(anchor, &mut img);
            upper = upper.min(dist(x, &img));
            if lower <= upper {
                heap.push(Node {
                    lower,
                    word: node.word.child(j),
                    map,
                });
            }
        }
    }
    // every cylinder was pruned against an upper bound attained by a point of F
    Interval::new(upper, upper)
}
