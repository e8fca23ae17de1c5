use std::fmt;
use std::net::Ipv4Addr;

use crate::flowkit::MacAddr;

/// Switch port a host hangs off. Port 0 on the gateway stands for
/// "outside the known topology".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Attach {
    pub switch: usize,
    pub port: u16,
}

/// `<IP, MAC, SwitchID:port>` identity of a host.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HostTuple {
    pub ip: Ipv4Addr,
    pub mac: MacAddr,
    pub attach: Attach,
}

impl HostTuple {
    /// Number of equal fields among ip, mac and attachment (0..=3).
    pub fn matching_fields(&self, other: &HostTuple) -> u8 {
        u8::from(self.ip == other.ip)
            + u8::from(self.mac == other.mac)
            + u8::from(self.attach == other.attach)
    }
}

impl fmt::Display for HostTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/S{}:{}",
            self.ip, self.mac, self.attach.switch, self.attach.port
        )
    }
}
