//! Binary sum tree over integer weights: point update and proportional
//! sampling in `O(log n)`. Weights are integer infection pressures, so the
//! running total never drifts.

pub(crate) struct SumTree {
    leaves: usize,
    nodes: Vec<u64>,
}

impl SumTree {
    pub(crate) fn new(len: usize) -> Self {
        let leaves = len.max(1).next_power_of_two();
        SumTree { leaves, nodes: vec![0; 2 * leaves] }
    }

    pub(crate) fn total(&self) -> u64 {
        self.nodes[1]
    }

    pub(crate) fn get(&self, i: usize) -> u64 {
        self.nodes[self.leaves + i]
    }

    pub(crate) fn set(&mut self, i: usize, weight: u64) {
        let mut pos = self.leaves + i;
        self.nodes[pos] = weight;
        while pos > 1 {
            pos /= 2;
            self.nodes[pos] = self.nodes[2 * pos] + self.nodes[2 * pos + 1];
        }
    }

    /// Leaf `i` such that the prefix sum before `i` is `<= target` and the
    /// prefix through `i` exceeds it. Requires `target < total()`.
    pub(crate) fn find(&self, mut target: u64) -> usize {
        debug_assert!(target < self.total());
        let mut pos = 1;
        while pos < self.leaves {
            let left = self.nodes[2 * pos];
            if target < left {
                pos *= 2;
            } else {
                target -= left;
                pos = 2 * pos + 1;
            }
        }
        pos - self.leaves
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_respects_weights() {
        let mut t = SumTree::new(5);
        for (i, w) in [3, 0, 2, 0, 5].into_iter().enumerate() {
            t.set(i, w);
        }
        assert_eq!(t.total(), 10);
        let hits: Vec<usize> = (0..10).map(|x| t.find(x)).collect();
        assert_eq!(hits, vec![0, 0, 0, 2, 2, 4, 4, 4, 4, 4]);
        t.set(4, 0);
        assert_eq!(t.total(), 5);
        assert_eq!(t.get(2), 2);
    }
}
