//! Next-hop selection and routing-state maintenance.
//!
//! Each protocol is a set of pure functions over its tables; the simulator
//! wires them to frame reception and head-of-line decisions.

pub mod dsdv;
pub mod greedy;
pub mod neighbors;
pub mod opar;
pub mod qrouting;

use serde::{Deserialize, Serialize};

pub use neighbors::{NeighborEntry, NeighborTable};

pub type UavId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingProtocol {
    Greedy,
    Dsdv,
    Opar,
    QRouting,
}

impl RoutingProtocol {
    pub fn name(self) -> &'static str {
        match self {
            RoutingProtocol::Greedy => "greedy",
            RoutingProtocol::Dsdv => "dsdv",
            RoutingProtocol::Opar => "opar",
            RoutingProtocol::QRouting => "q_routing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "greedy" => Some(RoutingProtocol::Greedy),
            "dsdv" => Some(RoutingProtocol::Dsdv),
            "opar" => Some(RoutingProtocol::Opar),
            "q_routing" | "qrouting" => Some(RoutingProtocol::QRouting),
            _ => None,
        }
    }

    /// Whether the protocol learns neighbors from periodic hello beacons.
    pub fn uses_hello(self) -> bool {
        !matches!(self, RoutingProtocol::Opar)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteDecision {
    Forward(UavId),
    DeliverLocal,
    NoRoute,
}
