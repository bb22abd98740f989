// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disjoint, non-empty communities covering nodes `0..n`.
///
/// Communities are stored sorted internally and ordered by their smallest
/// member, so two partitions describing the same grouping compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    communities: Vec<Vec<usize>>,
    membership: Vec<usize>,
}

impl Partition {
    pub fn from_communities(mut communities: Vec<Vec<usize>>) -> Result<Partition> {
        let n: usize = communities.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for comm in &communities {
            if comm.is_empty() {
                return Err(Error::InvalidPartition("empty community".into()));
            }
            for &v in comm {
                if v >= n {
                    return Err(Error::InvalidPartition(format!("node {v} outside 0..{n}")));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidPartition(format!("node {v} appears twice")));
                }
            }
        }
        for comm in &mut communities {
            comm.sort_unstable();
        }
        communities.sort_unstable_by_key(|c| c[0]);
        let mut membership = vec![0; n];
        for (k, comm) in communities.iter().enumerate() {
            for &v in comm {
                membership[v] = k;
            }
        }
        Ok(Partition {
            communities,
            membership,
        })
    }

    /// Groups nodes by equal label. `labels[i]` is the label of node `i`.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: &[L]) -> Partition {
        let mut index: HashMap<&L, usize> = HashMap::new();
        let mut communities: Vec<Vec<usize>> = Vec::new();
        for (v, label) in labels.iter().enumerate() {
            let k = *index.entry(label).or_insert_with(|| {
                communities.push(Vec::new());
                communities.len() - 1
            });
            communities[k].push(v);
        }
        // first-appearance order already sorts communities by smallest member
        let membership = {
            let mut m = vec![0; labels.len()];
            for (k, comm) in communities.iter().enumerate() {
                for &v in comm {
                    m[v] = k;
                }
            }
            m
        };
        Partition {
            communities,
            membership,
        }
    }

    /// Every node in a single community.
    pub fn whole(n: usize) -> Partition {
        Partition::from_labels(&vec![0u8; n])
    }

    pub fn singletons(n: usize) -> Partition {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    /// Number of nodes covered.
    pub fn n(&self) -> usize {
        self.membership.len()
    }

    /// Number of communities.
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn community_of(&self, v: usize) -> usize {
        self.membership[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.communities.iter().map(Vec::len).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlap_gap_and_empty() {
        assert!(Partition::from_communities(vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::from_communities(vec![vec![0, 2]]).is_err());
        assert!(Partition::from_communities(vec![vec![0], vec![]]).is_err());
    }

    #[test]
    fn canonical_order() {
        let a = Partition::from_communities(vec![vec![3, 2], vec![1, 0]]).unwrap();
        let b = Partition::from_labels(&['x', 'x', 'y', 'y']);
        assert_eq!(a, b);
        assert_eq!(a.community_of(3), 1);
        assert_eq!(a.sizes(), vec![2, 2]);
    }
}
