/// `k`-subsets of `0..n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut pos = k;
        while pos > 0 && self.idx[pos - 1] == self.n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            self.done = true;
        } else {
            self.idx[pos - 1] += 1;
            for j in pos..k {
                self.idx[j] = self.idx[j - 1] + 1;
            }
        }
        Some(out)
    }
}

/// Non-decreasing `k`-sequences over `0..n` (multisets), lexicographic.
#[derive(Debug, Clone)]
pub struct Multisets {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Multisets {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: vec![0; k],
            done: n == 0 && k > 0,
        }
    }
}

impl Iterator for Multisets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut pos = k;
        while pos > 0 && self.idx[pos - 1] == self.n - 1 {
            pos -= 1;
        }
        if pos == 0 {
            self.done = true;
        } else {
            let v = self.idx[pos - 1] + 1;
            for j in pos - 1..k {
                self.idx[j] = v;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(3, 3).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(Combinations::new(4, 0).count(), 1);
        assert_eq!(Multisets::new(12, 2).count(), 78);
        assert_eq!(Multisets::new(3, 3).count(), 10);
        assert_eq!(
            Multisets::new(2, 2).collect::<Vec<_>>(),
            vec![vec![0, 0], vec![0, 1], vec![1, 1]]
        );
    }
}
