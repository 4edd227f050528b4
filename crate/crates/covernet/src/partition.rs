//! Group assignments shared by every detector and by the evaluation code.

/// Assignment of each item to exactly one group.
///
/// Group ids are dense integers starting at 0, numbered by first occurrence
/// in item order, so two partitions describing the same grouping compare
/// equal regardless of how their source labels were spelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    group_count: usize,
}

impl Partition {
    /// Normalizes arbitrary labels into dense first-occurrence ids.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let mut assignment = Vec::with_capacity(labels.len());
        let mut next = 0usize;
        // Labels may be sparse; remap through a table keyed by label value.
        let mut table = std::collections::HashMap::new();
        for &label in labels {
            let id = *table.entry(label).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            assignment.push(id);
        }
        Partition {
            assignment,
            group_count: next,
        }
    }

    /// One group per item.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (0..n).collect(),
            group_count: n,
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn group_count(&self) -> usize {
        self.group_count
    }

    #[inline]
    pub fn group(&self, item: usize) -> usize {
        self.assignment[item]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn same_group(&self, a: usize, b: usize) -> bool {
        self.assignment[a] == self.assignment[b]
    }

    /// Members of each group, in item order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.group_count];
        for (item, &g) in self.assignment.iter().enumerate() {
            groups[g].push(item);
        }
        groups
    }

    /// Number of items in the group of `item`.
    pub fn group_size(&self, item: usize) -> usize {
        let g = self.assignment[item];
        self.assignment.iter().filter(|&&x| x == g).count()
    }
}
