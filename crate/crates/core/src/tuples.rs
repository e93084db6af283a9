//! Lexicographic iteration over tuples from a finite index range.

/// Calls `f` on every tuple in `[0, radix)^len`, in lexicographic order
/// (last coordinate fastest). The zero-length tuple is visited once.
pub(crate) fn for_each_tuple(len: usize, radix: usize, mut f: impl FnMut(&[usize])) {
    if radix == 0 && len > 0 {
        return;
    }
    let mut t = vec![0usize; len];
    'outer: loop {
        f(&t);
        let mut i = len;
        while i > 0 {
            i -= 1;
            t[i] += 1;
            if t[i] < radix {
                continue 'outer;
            }
            t[i] = 0;
        }
        return;
    }
}

/// Number of tuples `radix^len`, as u64 for report bookkeeping.
pub(crate) fn tuple_count(len: usize, radix: usize) -> u64 {
    (radix as u64).pow(len as u32)
}

/// Calls `f` on every tuple whose i-th coordinate ranges over
/// `[0, dims[i])`, in lexicographic order. Skipped entirely when any
/// dimension is zero; the zero-length product is visited once.
pub(crate) fn for_each_mixed(dims: &[usize], mut f: impl FnMut(&[usize])) {
    if dims.iter().any(|&d| d == 0) {
        return;
    }
    let mut t = vec![0usize; dims.len()];
    'outer: loop {
        f(&t);
        let mut i = dims.len();
        while i > 0 {
            i -= 1;
            t[i] += 1;
            if t[i] < dims[i] {
                continue 'outer;
            }
            t[i] = 0;
        }
        return;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let mut seen = Vec::new();
        for_each_tuple(2, 3, |t| seen.push(t.to_vec()));
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[3], vec![1, 0]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_tuple_visited_once() {
        let mut count = 0;
        for_each_tuple(0, 5, |_| count += 1);
        assert_eq!(count, 1);
    }
}
