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

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no edges or nodes")]
    EmptyInput,

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("modularity is undefined for a graph without edges")]
    NoEdges,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("partitions cover different node sets ({0} vs {1} nodes)")]
    SizeMismatch(usize, usize),

    #[error("at least two nodes are required, got {0}")]
    TooFewNodes(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible benchmark parameters: {0}")]
    Infeasible(String),

    #[error("edge wiring failed: {0}")]
    Wiring(String),

    #[error("degenerate fit range: {0}")]
    DegenerateRange(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
