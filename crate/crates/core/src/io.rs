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

//! Text formats for node assignments: `node label` lines, as written by
//! [`Labeling::write_text`](crate::lpa::Labeling::write_text) and
//! [`PlantedNetwork::write_truth`](crate::lfr::PlantedNetwork::write_truth).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Parses `node label` lines. Blank lines and `#`/`%` comments are skipped.
pub fn parse_assignment(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected `node label`, found {} tokens", tokens.len()),
            });
        }
        out.push((tokens[0].to_owned(), tokens[1].to_owned()));
    }
    Ok(out)
}

/// Builds a partition over `names` (index = node id). Every name must be
/// assigned exactly once.
pub fn assignment_partition(pairs: &[(String, String)], names: &[String]) -> Result<Partition> {
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut labels: Vec<Option<&str>> = vec![None; names.len()];
    for (node, label) in pairs {
        let &v = index
            .get(node.as_str())
            .ok_or_else(|| Error::InvalidPartition(format!("node `{node}` is not in the graph")))?;
        if labels[v].replace(label.as_str()).is_some() {
            return Err(Error::InvalidPartition(format!(
                "node `{node}` assigned twice"
            )));
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| {
            l.ok_or_else(|| Error::InvalidPartition(format!("node `{}` has no label", names[v])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::from_labels(&labels))
}

/// Node names in order of first appearance in `pairs`.
pub fn assignment_names(pairs: &[(String, String)]) -> Vec<String> {
    pairs.iter().map(|(node, _)| node.clone()).collect()
}
