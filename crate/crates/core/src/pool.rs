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

use rand::Rng;

const ABSENT: usize = usize::MAX;

/// Set of node ids with O(1) insert, remove and uniform sampling.
///
/// Members live in a dense vector; `position` maps a node to its slot.
/// Removal swaps the last member into the vacated slot.
#[derive(Debug, Clone)]
pub struct ActivePool {
    members: Vec<usize>,
    position: Vec<usize>,
}

impl ActivePool {
    /// Empty pool over node ids `0..n`.
    pub fn new(n: usize) -> ActivePool {
        ActivePool {
            members: Vec::new(),
            position: vec![ABSENT; n],
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.position[v] != ABSENT
    }

    /// Returns false if `v` was already present.
    pub fn insert(&mut self, v: usize) -> bool {
        if self.contains(v) {
            return false;
        }
        self.position[v] = self.members.len();
        self.members.push(v);
        true
    }

    /// Returns false if `v` was absent.
    pub fn remove(&mut self, v: usize) -> bool {
        let slot = self.position[v];
        if slot == ABSENT {
            return false;
        }
        self.members.swap_remove(slot);
        if let Some(&moved) = self.members.get(slot) {
            self.position[moved] = slot;
        }
        self.position[v] = ABSENT;
        true
    }

    /// Uniformly random member, or `None` when empty.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.members.is_empty() {
            None
        } else {
            Some(self.members[rng.random_range(0..self.members.len())])
        }
    }

    /// Members in internal slot order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }
}
