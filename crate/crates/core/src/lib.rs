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

//! Community detection by label propagation.
//!
//! The engine in [`lpa`] supports the classic majority rule and a
//! neighborhood-strength rule that weights each neighbor by how many other
//! neighbors it touches. A pool of active nodes lets the asynchronous loop
//! skip nodes whose label would not change. [`metrics`] and [`lfr`] supply
//! the evaluation side: modularity, NMI and ARI scores and planted-partition
//! benchmark graphs. [`experiment`] drives seeded batches of runs and
//! aggregates them into reports.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod lfr;
pub mod lpa;
pub mod metrics;
pub mod partition;
pub mod pool;

pub use error::{Error, Result};
pub use graph::{Graph, ParsedGraph};
pub use lfr::{LfrParams, PlantedNetwork};
pub use lpa::{Labeling, LpaConfig, NodeState, RunResult};
pub use partition::Partition;
pub use pool::ActivePool;
