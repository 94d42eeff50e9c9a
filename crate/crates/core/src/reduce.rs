//! Extended reduce-list folding.
//!
//! Each reduce-list element carries a `reduce_counter`. Elements whose counter
//! is zero are skipped; the remaining values are folded left to right, seeded
//! by the first counted element, and their counters are summed.

/// A reduce-list value paired with the number of map results folded into it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedReduceElement<R> {
    value: Option<R>,
    reduce_counter: u64,
}

impl<R> ExtendedReduceElement<R> {
    pub fn new(value: R, reduce_counter: u64) -> Self {
        ExtendedReduceElement {
            value: Some(value),
            reduce_counter,
        }
    }

    /// Result of one successful map application.
    pub fn counted(value: R) -> Self {
        Self::new(value, 1)
    }

    /// An element that contributes nothing to a fold.
    pub fn empty() -> Self {
        ExtendedReduceElement {
            value: None,
            reduce_counter: 0,
        }
    }

    pub fn reduce_counter(&self) -> u64 {
        self.reduce_counter
    }

    /// The folded value, or `None` when nothing was counted.
    pub fn value(&self) -> Option<&R> {
        if self.reduce_counter == 0 {
            None
        } else {
            self.value.as_ref()
        }
    }

    pub fn into_value(self) -> Option<R> {
        if self.reduce_counter == 0 {
            None
        } else {
            self.value
        }
    }

    pub fn is_empty(&self) -> bool {
        self.value().is_none()
    }
}

/// Folds `elems` with `op` (an in-place `acc = acc ⊕ y`), ignoring elements
/// whose counter is zero.
pub fn process_extended_reduce_list<R, I, F>(elems: I, mut op: F) -> ExtendedReduceElement<R>
where
    I: IntoIterator<Item = ExtendedReduceElement<R>>,
    F: FnMut(&mut R, &R),
{
    let mut acc: Option<R> = None;
    let mut counter = 0u64;
    for elem in elems {
        if elem.reduce_counter == 0 {
            continue;
        }
        counter += elem.reduce_counter;
        let Some(value) = elem.value else { continue };
        match acc.as_mut() {
            None => acc = Some(value),
            Some(acc) => op(acc, &value),
        }
    }
    match acc {
        Some(value) => ExtendedReduceElement::new(value, counter),
        None => ExtendedReduceElement::empty(),
    }
}

/// Partial folding of one worker's reduce-sublist.
pub fn worker_reduce<R, I, F>(extended_sublist: I, op: F) -> ExtendedReduceElement<R>
where
    I: IntoIterator<Item = ExtendedReduceElement<R>>,
    F: FnMut(&mut R, &R),
{
    process_extended_reduce_list(extended_sublist, op)
}

/// Final folding of the workers' partial results, given in ascending rank.
pub fn master_reduce<R, I, F>(partials: I, op: F) -> ExtendedReduceElement<R>
where
    I: IntoIterator<Item = ExtendedReduceElement<R>>,
    F: FnMut(&mut R, &R),
{
    process_extended_reduce_list(partials, op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn add(acc: &mut i64, y: &i64) {
        *acc += y;
    }

    fn elems(pairs: &[(i64, u64)]) -> Vec<ExtendedReduceElement<i64>> {
        pairs.iter().map(|&(v, c)| ExtendedReduceElement::new(v, c)).collect()
    }

    #[test]
    fn zero_counters_are_skipped() {
        let r = process_extended_reduce_list(elems(&[(5, 1), (9, 0), (7, 1)]), add);
        assert_eq!(r, ExtendedReduceElement::new(12, 2));
    }

    #[test]
    fn single_element() {
        let r = process_extended_reduce_list(elems(&[(3, 1)]), add);
        assert_eq!(r, ExtendedReduceElement::new(3, 1));
    }

    #[test]
    fn all_ignored_yields_empty() {
        let r = process_extended_reduce_list(elems(&[(3, 0), (4, 0)]), add);
        assert_eq!(r.reduce_counter(), 0);
        assert_eq!(r.value(), None);
    }

    #[test]
    fn worker_partial_fold() {
        let r = worker_reduce(elems(&[(1, 1), (2, 1), (4, 1)]), add);
        assert_eq!(r, ExtendedReduceElement::new(7, 3));
        let ignored = worker_reduce(elems(&[(8, 0)]), add);
        assert!(ignored.is_empty());
    }

    #[test]
    fn master_fold_of_partials() {
        let r = master_reduce(elems(&[(7, 3), (5, 2)]), add);
        assert_eq!(r, ExtendedReduceElement::new(12, 5));
        let r = master_reduce(
            vec![ExtendedReduceElement::empty(), ExtendedReduceElement::new(5, 2)],
            add,
        );
        assert_eq!(r, ExtendedReduceElement::new(5, 2));
    }

    #[test]
    fn fold_is_left_to_right() {
        let words = vec![
            ExtendedReduceElement::counted(vec!['a']),
            ExtendedReduceElement::new(vec!['x'], 0),
            ExtendedReduceElement::counted(vec!['b']),
            ExtendedReduceElement::counted(vec!['c']),
        ];
        let r = process_extended_reduce_list(words, |acc: &mut Vec<char>, y| acc.extend_from_slice(y));
        assert_eq!(r.value(), Some(&vec!['a', 'b', 'c']));
    }

    proptest! {
        // Splitting a list into contiguous chunks, folding each, then folding
        // the partials gives the same value and counter as one flat fold.
        #[test]
        fn two_level_fold_matches_flat(
            pairs in proptest::collection::vec((any::<i32>(), 0u64..3), 1..200),
            chunks in 1usize..16,
        ) {
            let list: Vec<_> = pairs.iter().map(|&(v, c)| ExtendedReduceElement::new(v as i64, c)).collect();
            let flat = process_extended_reduce_list(list.clone(), add);
            let chunk = list.len().div_ceil(chunks);
            let partials: Vec<_> = list.chunks(chunk).map(|c| worker_reduce(c.to_vec(), add)).collect();
            let nested = master_reduce(partials, add);
            prop_assert_eq!(flat.value(), nested.value());
            prop_assert_eq!(flat.reduce_counter(), nested.reduce_counter());
            let expected: u64 = pairs.iter().map(|p| p.1).sum();
            prop_assert_eq!(flat.reduce_counter(), expected);
        }
    }
}
