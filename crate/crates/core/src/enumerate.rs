//! Chunked Gray-code scans over sign patterns and set partitions.

/// Reflected binary Gray code of `i`.
pub(crate) fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Splits `0..2^free_bits` into contiguous chunks for parallel Gray-code scans.
/// The split depends only on `free_bits`, never on the thread count.
pub(crate) fn gray_chunks(free_bits: u32) -> Vec<(u64, u64)> {
    let total = 1u64 << free_bits;
    let chunk_bits = free_bits.saturating_sub(8);
    let size = 1u64 << chunk_bits;
    (0..total / size).map(|c| (c * size, (c + 1) * size)).collect()
}

/// Stirling number of the second kind S(n, k).
pub(crate) fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = row[j].saturating_mul(j as u128).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

/// All set partitions of `0..m` into at most `max_blocks` nonempty blocks, as
/// restricted growth strings (`rgs[i]` is the block of element `i`, blocks
/// numbered in order of first appearance).
pub(crate) fn restricted_growth_strings(m: usize, max_blocks: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if m == 0 || max_blocks == 0 {
        return out;
    }
    let mut rgs = vec![0u8; m];
    fn rec(i: usize, used: usize, max_blocks: usize, rgs: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == rgs.len() {
            out.push(rgs.clone());
            return;
        }
        for b in 0..=used.min(max_blocks - 1) {
            rgs[i] = b as u8;
            rec(i + 1, used.max(b + 1), max_blocks, rgs, out);
        }
    }
    rgs[0] = 0;
    rec(1, 1, max_blocks, &mut rgs, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        for i in 1..64u64 {
            let d = gray(i) ^ gray(i - 1);
            assert_eq!(d.count_ones(), 1);
            assert_eq!(d.trailing_zeros(), i.trailing_zeros());
        }
    }

    #[test]
    fn chunks_cover_range() {
        for bits in [0u32, 3, 8, 9, 12] {
            let chunks = gray_chunks(bits);
            assert_eq!(chunks.first().unwrap().0, 0);
            assert_eq!(chunks.last().unwrap().1, 1 << bits);
            for w in chunks.windows(2) {
                assert_eq!(w[0].1, w[1].0);
            }
        }
    }

    #[test]
    fn partition_counts_match_stirling() {
        for m in 1..=6 {
            for k in 1..=m {
                let expected: u128 = (1..=k).map(|b| stirling2(m, b)).sum();
                assert_eq!(restricted_growth_strings(m, k).len() as u128, expected);
            }
        }
        assert_eq!(stirling2(5, 2), 15);
        assert_eq!(restricted_growth_strings(4, 4).len(), 15);
    }
}
