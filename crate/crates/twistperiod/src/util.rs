//! Small shared helpers.

/// All subsets of `items` of the given size, in lexicographic index order.
pub fn subsets<T: Clone>(items: &[T], size: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    if size > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
        // advance combination
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - size {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Binomial coefficient with the usual conventions (`0` when `k > n`).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Kahan compensated summation for complex totals.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: num_complex::Complex64,
    c: num_complex::Complex64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: num_complex::Complex64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> num_complex::Complex64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration() {
        let s = subsets(&[1, 2, 3, 4], 2);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], vec![1, 2]);
        assert_eq!(s[5], vec![3, 4]);
        assert_eq!(subsets(&[1, 2], 3).len(), 0);
        assert_eq!(subsets::<i32>(&[], 0), vec![Vec::<i32>::new()]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(8, 3), 56);
    }
}
