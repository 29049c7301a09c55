//! Standard column reduction over F2.

const NONE: u32 = u32::MAX;

/// Symmetric difference of two sorted columns, written into `out`.
fn xor_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Result of reducing a boundary matrix: `low[j]` is the pivot row of the
/// reduced column `j`, if any.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub low: Vec<Option<u32>>,
    pub is_birth: Vec<bool>,
}

impl Reduction {
    /// (birth, death) index pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.low
            .iter()
            .enumerate()
            .filter_map(|(j, l)| l.map(|i| (i as usize, j)))
    }

    /// Indices that are neither killed nor killing.
    pub fn essential(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.low.len()).filter(|&j| self.low[j].is_none() && !self.is_birth[j])
    }
}

/// Reduces columns left to right. Columns must be sorted and strictly upper
/// triangular.
pub fn reduce(columns: &[Vec<u32>]) -> Reduction {
    let n = columns.len();
    let mut reduced: Vec<Vec<u32>> = columns.to_vec();
    let mut pivot_owner = vec![NONE; n];
    let mut low = vec![None; n];
    let mut is_birth = vec![false; n];
    let mut scratch = Vec::new();

    for j in 0..n {
        let mut col = std::mem::take(&mut reduced[j]);
        while let Some(&p) = col.last() {
            let owner = pivot_owner[p as usize];
            if owner == NONE {
                break;
            }
            xor_into(&col, &reduced[owner as usize], &mut scratch);
            std::mem::swap(&mut col, &mut scratch);
        }
        if let Some(&p) = col.last() {
            pivot_owner[p as usize] = j as u32;
            low[j] = Some(p);
            is_birth[p as usize] = true;
        }
        reduced[j] = col;
    }
    Reduction { low, is_birth }
}

/// Transposes a strictly upper triangular matrix and reverses the order, so
/// the result is the coboundary in reversed filtration order.
pub fn anti_transpose(columns: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = columns.len();
    let mut out = vec![Vec::new(); n];
    for (j, col) in columns.iter().enumerate() {
        for &i in col {
            // entry (i, j) moves to (n-1-j, n-1-i)
            out[n - 1 - i as usize].push((n - 1 - j) as u32);
        }
    }
    for col in &mut out {
        col.sort_unstable();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_cancels_common_rows() {
        let mut out = Vec::new();
        xor_into(&[0, 2, 5], &[2, 3], &mut out);
        assert_eq!(out, vec![0, 3, 5]);
    }

    #[test]
    fn triangle_boundary() {
        // vertices 0,1,2; edges 3=01, 4=12, 5=02; face 6
        let cols = vec![
            vec![],
            vec![],
            vec![],
            vec![0, 1],
            vec![1, 2],
            vec![0, 2],
            vec![3, 4, 5],
        ];
        let r = reduce(&cols);
        let pairs: Vec<_> = r.pairs().collect();
        assert_eq!(pairs, vec![(1, 3), (2, 4), (5, 6)]);
        assert_eq!(r.essential().collect::<Vec<_>>(), vec![0]);
    }
}
