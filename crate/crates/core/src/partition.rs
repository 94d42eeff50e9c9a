//! Splitting the map-list into `K` contiguous sublists whose lengths differ
//! by at most one. The first `list_size % K` workers take the extra element.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::BsfError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignments: Vec<(usize, usize)>,
}

impl Partition {
    /// `(offset, length)` for every worker, in rank order.
    pub fn assignments(&self) -> &[(usize, usize)] {
        &self.assignments
    }

    pub fn num_workers(&self) -> usize {
        self.assignments.len()
    }

    pub fn offset(&self, rank: usize) -> usize {
        self.assignments[rank].0
    }

    pub fn length(&self, rank: usize) -> usize {
        self.assignments[rank].1
    }

    pub fn range(&self, rank: usize) -> Range<usize> {
        let (offset, length) = self.assignments[rank];
        offset..offset + length
    }

    pub fn list_size(&self) -> usize {
        self.assignments.iter().map(|(_, len)| len).sum()
    }
}

pub fn partition_list(list_size: usize, num_workers: usize) -> Result<Partition, BsfError> {
    if num_workers == 0 {
        return Err(BsfError::InvalidConfig("num_workers must be at least 1"));
    }
    if list_size < num_workers {
        return Err(BsfError::ListTooShort { list_size, num_workers });
    }
    let base = list_size / num_workers;
    let extra = list_size % num_workers;
    let mut offset = 0;
    let assignments = (0..num_workers)
        .map(|rank| {
            let length = base + usize::from(rank < extra);
            let entry = (offset, length);
            offset += length;
            entry
        })
        .collect();
    Ok(Partition { assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn remainder_goes_to_lowest_ranks() {
        let p = partition_list(10, 3).unwrap();
        assert_eq!(p.assignments(), &[(0, 4), (4, 3), (7, 3)]);
    }

    #[test]
    fn even_split() {
        let p = partition_list(6, 3).unwrap();
        assert_eq!(p.assignments(), &[(0, 2), (2, 2), (4, 2)]);
    }

    #[test]
    fn list_too_short() {
        assert_eq!(
            partition_list(3, 5),
            Err(BsfError::ListTooShort {
                list_size: 3,
                num_workers: 5
            })
        );
    }

    #[test]
    fn single_worker_takes_everything() {
        let p = partition_list(1, 1).unwrap();
        assert_eq!(p.assignments(), &[(0, 1)]);
        assert_eq!(p.range(0), 0..1);
    }

    #[test]
    fn laws_hold_for_small_sizes() {
        for n in 1..=64 {
            for k in 1..=n {
                let p = partition_list(n, k).unwrap();
                let lengths: Vec<usize> = p.assignments().iter().map(|a| a.1).collect();
                assert_eq!(p.offset(0), 0);
                for j in 1..k {
                    assert_eq!(p.offset(j), p.offset(j - 1) + p.length(j - 1));
                }
                assert_eq!(p.list_size(), n);
                let max = *lengths.iter().max().unwrap();
                let min = *lengths.iter().min().unwrap();
                assert!(max - min <= 1);
                assert!(min >= 1);
            }
        }
        assert_eq!(vec![(0usize, 1usize)], partition_list(1, 1).unwrap().assignments);
    }
}
