use std::collections::HashSet;

use super::HostTuple;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketIn {
    pub src: HostTuple,
    pub dest: HostTuple,
    pub switch: usize,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    InstallPktBlocking { switch: usize, src: HostTuple },
    AppendBlockList(HostTuple),
    AppendObservingList(HostTuple),
    DropPending,
    InstallAllow { switch: usize, dest: HostTuple },
    ForwardPending,
}

/// Host lists held by the controller. Appends are duplicate-free.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    network_list: Vec<HostTuple>,
    observing_list: Vec<HostTuple>,
    block_list: Vec<HostTuple>,
    observing_set: HashSet<HostTuple>,
    block_set: HashSet<HostTuple>,
    /// Number of switches the mitigation loop walks (`K`).
    switch_count: usize,
    comparisons: u64,
}

impl ControllerState {
    pub fn new(network_list: Vec<HostTuple>, switch_count: usize) -> Self {
        ControllerState {
            network_list,
            observing_list: Vec::new(),
            block_list: Vec::new(),
            observing_set: HashSet::new(),
            block_set: HashSet::new(),
            switch_count: switch_count.max(1),
            comparisons: 0,
        }
    }

    pub fn network_list(&self) -> &[HostTuple] {
        &self.network_list
    }

    pub fn observing_list(&self) -> &[HostTuple] {
        &self.observing_list
    }

    pub fn block_list(&self) -> &[HostTuple] {
        &self.block_list
    }

    /// Network_List entry comparisons performed so far.
    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    /// Returns whether the tuple was new.
    pub fn observe(&mut self, t: HostTuple) -> bool {
        let new = self.observing_set.insert(t);
        if new {
            self.observing_list.push(t);
        }
        new
    }

    fn block(&mut self, t: HostTuple) {
        if self.block_set.insert(t) {
            self.block_list.push(t);
        }
    }

    fn best_match(&mut self, dest: &HostTuple) -> u8 {
        self.comparisons += self.network_list.len() as u64;
        self.network_list
            .iter()
            .map(|n| n.matching_fields(dest))
            .max()
            .unwrap_or(0)
    }

    /// One pass of the mitigation loop for a Packet-In.
    ///
    /// Walks every switch, and for each one the Observing_List as it stood
    /// on entry. A full source match blocks; otherwise the destination is
    /// scored against the whole Network_List and anything short of a
    /// three-field match marks the source as suspicious.
    pub fn mitigate(&mut self, msg: &PacketIn) -> Vec<Action> {
        let observed = self.observing_list.len();
        let mut blocked = false;
        let mut suspicious = false;
        for _ in 0..self.switch_count {
            let mut scanned = false;
            for i in 0..observed {
                if self.observing_list[i] == msg.src {
                    blocked = true;
                    break;
                }
                scanned = true;
                suspicious |= self.best_match(&msg.dest) != 3;
            }
            if observed == 0 && !scanned {
                suspicious |= self.best_match(&msg.dest) != 3;
            }
        }
        if blocked {
            self.block(msg.src);
            vec![
                Action::InstallPktBlocking {
                    switch: msg.switch,
                    src: msg.src,
                },
                Action::AppendBlockList(msg.src),
            ]
        } else if suspicious {
            self.observe(msg.src);
            vec![Action::AppendObservingList(msg.src), Action::DropPending]
        } else {
            vec![
                Action::InstallAllow {
                    switch: msg.switch,
                    dest: msg.dest,
                },
                Action::ForwardPending,
            ]
        }
    }
}
