//! Lexicographic odometer over integer boxes.

/// Calls `f` on every integer vector in `[lo, hi]` (inclusive), first
/// coordinate slowest. Stops early when `f` returns `false`; returns whether
/// the walk ran to completion.
pub fn for_each_in_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64]) -> bool) -> bool {
    let n = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return true;
    }
    let mut z = lo.to_vec();
    loop {
        if !f(&z) {
            return false;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if z[i] < hi[i] {
                z[i] += 1;
                break;
            }
            z[i] = lo[i];
        }
    }
}

/// Number of integer points in the box, as f64 to survive overflow.
pub fn box_size(lo: &[i64], hi: &[i64]) -> f64 {
    lo.iter().zip(hi).map(|(a, b)| (b - a + 1).max(0) as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_in_box(&[0, -1], &[1, 0], |z| {
            seen.push(z.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0]]);
        assert_eq!(box_size(&[0, -1], &[1, 0]), 4.0);
    }

    #[test]
    fn empty_and_zero_dim() {
        let mut count = 0;
        for_each_in_box(&[1], &[0], |_| {
            count += 1;
            true
        });
        assert_eq!(count, 0);
        for_each_in_box(&[], &[], |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }
}
