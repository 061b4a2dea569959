//! Packing of variable-length patch sequences into fixed-capacity sequences.
//!
//! Several images are concatenated into one packed sequence. Each source
//! image occupies a contiguous segment, and attention is only allowed between
//! positions of the same segment, which makes the per-sequence mask
//! block-diagonal.

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PackItem {
    pub id: String,
    pub length: usize,
}

impl PackItem {
    pub fn new(id: impl Into<String>, length: usize) -> Self {
        PackItem {
            id: id.into(),
            length,
        }
    }
}

/// One packed sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedBin {
    pub items: Vec<PackItem>,
    /// Segment boundaries: `offsets[k]..offsets[k + 1]` is item `k`.
    /// Starts at 0 and ends at the used length.
    pub offsets: Vec<usize>,
}

impl PackedBin {
    fn empty() -> Self {
        PackedBin {
            items: Vec::new(),
            offsets: vec![0],
        }
    }

    fn push(&mut self, item: PackItem) {
        let end = self.used() + item.length;
        self.items.push(item);
        self.offsets.push(end);
    }

    pub fn used(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Index of the segment containing `pos`, if `pos` is inside the bin.
    pub fn segment_of(&self, pos: usize) -> Option<usize> {
        if pos >= self.used() {
            return None;
        }
        // offsets is strictly increasing because every item has length >= 1
        Some(self.offsets.partition_point(|&o| o <= pos) - 1)
    }

    /// Dense row-major `used × used` visibility mask.
    pub fn attention_mask(&self) -> Vec<bool> {
        let n = self.used();
        let mut mask = vec![false; n * n];
        for w in self.offsets.windows(2) {
            let (start, end) = (w[0], w[1]);
            for i in start..end {
                mask[i * n + start..i * n + end].fill(true);
            }
        }
        mask
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackPlan {
    pub max_len: usize,
    pub bins: Vec<PackedBin>,
}

impl PackPlan {
    pub fn free(&self, bin: usize) -> Option<usize> {
        self.bins.get(bin).map(|b| self.max_len - b.used())
    }

    pub fn total_len(&self) -> usize {
        self.bins.iter().map(PackedBin::used).sum()
    }
}

/// First-fit decreasing: longest item first (ties by ascending id), each
/// into the lowest-indexed bin with room.
pub fn pack_ffd(items: &[PackItem], max_len: usize) -> Result<PackPlan> {
    if max_len == 0 {
        return Err(Error::invalid("max_len must be at least 1"));
    }
    for it in items {
        if it.length == 0 {
            return Err(Error::invalid(format!("item `{}` has zero length", it.id)));
        }
        if it.length > max_len {
            return Err(Error::OversizeItem {
                id: it.id.clone(),
                length: it.length,
                max_len,
            });
        }
    }

    let mut sorted: Vec<&PackItem> = items.iter().collect();
    sorted.sort_by(|a, b| {
        Reverse(a.length)
            .cmp(&Reverse(b.length))
            .then_with(|| a.id.cmp(&b.id))
    });

    let mut bins: Vec<PackedBin> = Vec::new();
    for item in sorted {
        match bins.iter().position(|b| b.used() + item.length <= max_len) {
            Some(i) => bins[i].push(item.clone()),
            None => {
                let mut bin = PackedBin::empty();
                bin.push(item.clone());
                bins.push(bin);
            }
        }
    }
    Ok(PackPlan { max_len, bins })
}

pub fn attention_allowed(plan: &PackPlan, bin: usize, i: usize, j: usize) -> Result<bool> {
    let b = plan
        .bins
        .get(bin)
        .ok_or_else(|| Error::invalid(format!("bin {bin} out of range ({} bins)", plan.bins.len())))?;
    let seg = |p: usize| {
        b.segment_of(p).ok_or_else(|| {
            Error::invalid(format!("position {p} out of range for bin of length {}", b.used()))
        })
    };
    Ok(seg(i)? == seg(j)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn items(lengths: &[usize]) -> Vec<PackItem> {
        lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| PackItem::new(format!("i{i}"), l))
            .collect()
    }

    fn lengths(plan: &PackPlan) -> Vec<Vec<usize>> {
        plan.bins
            .iter()
            .map(|b| b.items.iter().map(|i| i.length).collect())
            .collect()
    }

    #[test]
    fn ffd_trace() {
        let plan = pack_ffd(&items(&[4, 2, 3]), 6).unwrap();
        assert_eq!(lengths(&plan), vec![vec![4, 2], vec![3]]);
        assert_eq!(plan.bins[0].offsets, vec![0, 4, 6]);
        assert_eq!(plan.free(1), Some(3));
    }

    #[test]
    fn empty_input() {
        let plan = pack_ffd(&[], 6).unwrap();
        assert!(plan.bins.is_empty());
    }

    #[test]
    fn oversize_names_item() {
        let err = pack_ffd(&[PackItem::new("big", 7)], 6).unwrap_err();
        assert!(matches!(err, Error::OversizeItem { ref id, .. } if id == "big"));
    }

    #[test]
    fn ties_break_by_id() {
        let its = vec![PackItem::new("b", 3), PackItem::new("a", 3), PackItem::new("c", 3)];
        let plan = pack_ffd(&its, 6).unwrap();
        let ids: Vec<&str> = plan.bins[0].items.iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(plan.bins[1].items[0].id, "c");
    }

    #[test]
    fn zero_capacity_and_zero_length() {
        assert!(pack_ffd(&items(&[1]), 0).is_err());
        assert!(pack_ffd(&items(&[0]), 4).is_err());
    }

    #[test]
    fn mask_examples() {
        let plan = PackPlan {
            max_len: 6,
            bins: vec![{
                let mut b = PackedBin::empty();
                b.push(PackItem::new("a", 4));
                b.push(PackItem::new("b", 2));
                b
            }],
        };
        assert!(attention_allowed(&plan, 0, 0, 3).unwrap());
        assert!(!attention_allowed(&plan, 0, 3, 4).unwrap());
        assert!(attention_allowed(&plan, 0, 4, 5).unwrap());
        assert!(attention_allowed(&plan, 0, 6, 0).is_err());
        assert!(attention_allowed(&plan, 1, 0, 0).is_err());
    }

    #[test]
    fn dense_mask_matches_predicate() {
        let plan = pack_ffd(&items(&[3, 1, 2]), 6).unwrap();
        let bin = &plan.bins[0];
        let n = bin.used();
        let mask = bin.attention_mask();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(mask[i * n + j], attention_allowed(&plan, 0, i, j).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn conservation_and_capacity(ls in proptest::collection::vec(1usize..=32, 0..40)) {
            let its = items(&ls);
            let plan = pack_ffd(&its, 32).unwrap();
            let mut ids: Vec<String> = plan.bins.iter().flat_map(|b| b.items.iter().map(|i| i.id.clone())).collect();
            ids.sort();
            let mut want: Vec<String> = its.iter().map(|i| i.id.clone()).collect();
            want.sort();
            prop_assert_eq!(ids, want);
            prop_assert_eq!(plan.total_len(), ls.iter().sum::<usize>());
            for b in &plan.bins {
                prop_assert!(b.used() <= 32);
                let mut acc = 0;
                for (k, it) in b.items.iter().enumerate() {
                    prop_assert_eq!(b.offsets[k], acc);
                    acc += it.length;
                }
                prop_assert_eq!(b.used(), acc);
            }
        }
    }
}
