use indexmap::IndexMap;

use super::HostTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    Allow,
    PktBlocking,
}

/// A flow-table entry. Blocking rules match the packet source, allow rules
/// the destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rule {
    pub kind: RuleKind,
    pub matches: HostTuple,
    pub install_time: f64,
    pub last_hit: f64,
    pub idle_timeout: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Install {
    Installed,
    AlreadyPresent,
    Refused,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Blocked,
    Allowed,
    Miss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchState {
    pub id: usize,
    pub ports: Option<u16>,
    pub capacity: usize,
    rules: IndexMap<(RuleKind, HostTuple), Rule>,
    pub packet_in_count: u64,
    pub drop_count: u64,
    pub refused_installs: u64,
}

impl SwitchState {
    pub fn new(id: usize, capacity: usize, ports: Option<u16>) -> Self {
        SwitchState {
            id,
            ports,
            capacity,
            rules: IndexMap::new(),
            packet_in_count: 0,
            drop_count: 0,
            refused_installs: 0,
        }
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Rules in installation order.
    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.values()
    }

    pub fn install(
        &mut self,
        kind: RuleKind,
        matches: HostTuple,
        now: f64,
        idle_timeout: Option<f64>,
    ) -> Install {
        if let Some(r) = self.rules.get_mut(&(kind, matches)) {
            r.last_hit = now;
            return Install::AlreadyPresent;
        }
        if self.rules.len() >= self.capacity {
            self.refused_installs += 1;
            return Install::Refused;
        }
        let idle_timeout = if kind == RuleKind::Allow {
            idle_timeout
        } else {
            None
        };
        self.rules.insert(
            (kind, matches),
            Rule {
                kind,
                matches,
                install_time: now,
                last_hit: now,
                idle_timeout,
            },
        );
        Install::Installed
    }

    /// Blocking rules take precedence over allow rules.
    pub fn lookup(&mut self, src: &HostTuple, dest: &HostTuple, now: f64) -> Lookup {
        if let Some(r) = self.rules.get_mut(&(RuleKind::PktBlocking, *src)) {
            r.last_hit = now;
            self.drop_count += 1;
            return Lookup::Blocked;
        }
        if let Some(r) = self.rules.get_mut(&(RuleKind::Allow, *dest)) {
            r.last_hit = now;
            return Lookup::Allowed;
        }
        Lookup::Miss
    }

    /// Removes rules idle for longer than their timeout; returns how many.
    pub fn expire(&mut self, now: f64) -> usize {
        let before = self.rules.len();
        self.rules
            .retain(|_, r| r.idle_timeout.is_none_or(|t| now - r.last_hit <= t));
        before - self.rules.len()
    }
}
