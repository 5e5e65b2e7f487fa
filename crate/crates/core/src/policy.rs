//! Mined RBAC policies and soundness verification.


use std::io::{self, Write};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AccessMatrix, Biclique, EdgeId};

/// Which phase of the pipeline created a role.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ReductionForced,
    ExactCover,
    Greedy,
    Lattice,
    LargeBiclique,
}

/// One role: a set of users granted a set of permissions.
#[derive(Clone, Debug)]
pub struct Role {
    /// Sorted user indices.
    pub users: Vec<u32>,
    /// Sorted permission indices.
    pub perms: Vec<u32>,
    pub provenance: Provenance,
}

impl Role {
    pub fn new(mut users: Vec<u32>, mut perms: Vec<u32>, provenance: Provenance) -> Self {
        users.sort_unstable();
        users.dedup();
        perms.sort_unstable();
        perms.dedup();
        Role {
            users,
            perms,
            provenance,
        }
    }

    pub fn from_biclique(b: &Biclique, provenance: Provenance) -> Self {
        Role {
            users: b.users().to_vec(),
            perms: b.perms().to_vec(),
            provenance,
        }
    }

    pub fn grants(&self, user: u32, perm: u32) -> bool {
        self.users.binary_search(&user).is_ok() && self.perms.binary_search(&perm).is_ok()
    }
}

/// A mined policy: the union over roles of `users x perms` is meant to equal
/// the edge set of the source matrix exactly.
#[derive(Clone, Debug, Default)]
pub struct RbacPolicy {
    pub roles: Vec<Role>,
}

impl RbacPolicy {
    pub fn new(roles: Vec<Role>) -> Self {
        RbacPolicy { roles }
    }

    /// The always-sound baseline: one role per edge.
    pub fn one_role_per_edge(m: &AccessMatrix) -> Self {
        let roles = m
            .edge_ids()
            .map(|e| {
                let (u, p) = m.endpoints(e);
                Role::new(vec![u], vec![p], Provenance::ExactCover)
            })
            .collect();
        RbacPolicy { roles }
    }

    pub fn role_count(&self) -> usize {
        self.roles.len()
    }
}

/// Result of checking a policy against its source matrix.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    /// Edges of the matrix granted by no role.
    pub uncovered: Vec<EdgeId>,
    /// (user, perm) pairs granted by some role that are not edges.
    pub overgranted: Vec<(u32, u32)>,
    /// Roles with an empty user or permission side.
    pub empty_roles: Vec<usize>,
    pub role_count: usize,
}

impl VerificationReport {
    pub fn is_sound(&self) -> bool {
        self.uncovered.is_empty() && self.overgranted.is_empty() && self.empty_roles.is_empty()
    }
}

/// Checks that `pol` reproduces the authorizations of `m` exactly: every
/// edge covered by some role, no (user, perm) grant outside the edge set,
/// no role with an empty side.
pub fn verify_policy(m: &AccessMatrix, pol: &RbacPolicy) -> VerificationReport {
    let mut covered = FixedBitSet::with_capacity(m.edge_count());
    let mut overgranted = Vec::new();
    let mut empty_roles = Vec::new();
    for (i, role) in pol.roles.iter().enumerate() {
        if role.users.is_empty() || role.perms.is_empty() {
            empty_roles.push(i);
        }
        for &u in &role.users {
            for &p in &role.perms {
                match m.edge_between(u, p) {
                    Some(e) => covered.insert(e.index()),
                    None => overgranted.push((u, p)),
                }
            }
        }
    }
    overgranted.sort_unstable();
    overgranted.dedup();
    let uncovered = m
        .edge_ids()
        .filter(|e| !covered.contains(e.index()))
        .collect();
    VerificationReport {
        uncovered,
        overgranted,
        empty_roles,
        role_count: pol.roles.len(),
    }
}

#[derive(Serialize, Deserialize)]
struct RoleDoc {
    users: Vec<String>,
    perms: Vec<String>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct PolicyDoc {
    role_count: usize,
    roles: Vec<RoleDoc>,
}

/// Writes the policy as JSON with identifier names and a stable key order.
pub fn write_policy_json<W: Write>(m: &AccessMatrix, pol: &RbacPolicy, w: &mut W) -> Result<()> {
    let doc = PolicyDoc {
        role_count: pol.roles.len(),
        roles: pol
            .roles
            .iter()
            .map(|r| RoleDoc {
                users: r.users.iter().map(|&u| m.user_name(u).to_owned()).collect(),
                perms: r.perms.iter().map(|&p| m.perm_name(p).to_owned()).collect(),
                provenance: r.provenance,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &doc).map_err(io::Error::from)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Reads a policy written by [`write_policy_json`], resolving identifier
/// names against `m`. Unknown names are reference errors.
pub fn read_policy_json<R: io::Read>(m: &AccessMatrix, r: R) -> Result<RbacPolicy> {
    let doc: PolicyDoc =
        serde_json::from_reader(r).map_err(|e| Error::Format(format!("policy JSON: {e}")))?;
    let mut roles = Vec::with_capacity(doc.roles.len());
    for role in doc.roles {
        let users = role
            .users
            .iter()
            .map(|name| {
                m.user_id(name).ok_or_else(|| Error::UnknownIdentifier {
                    kind: "user",
                    name: name.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let perms = role
            .perms
            .iter()
            .map(|name| {
                m.perm_id(name).ok_or_else(|| Error::UnknownIdentifier {
                    kind: "permission",
                    name: name.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        roles.push(Role::new(users, perms, role.provenance));
    }
    Ok(RbacPolicy { roles })
}

/// Renders a verification report with identifier names, for CLI output.
pub fn describe_report(m: &AccessMatrix, rep: &VerificationReport) -> String {
    let mut s = String::new();
    if rep.is_sound() {
        s.push_str(&format!("sound: {} roles\n", rep.role_count));
        return s;
    }
    s.push_str(&format!(
        "UNSOUND: {} roles, {} uncovered, {} over-granted, {} empty roles\n",
        rep.role_count,
        rep.uncovered.len(),
        rep.overgranted.len(),
        rep.empty_roles.len()
    ));
    for &e in rep.uncovered.iter().take(20) {
        let (u, p) = m.endpoints(e);
        s.push_str(&format!(
            "  uncovered: {} {}\n",
            m.user_name(u),
            m.perm_name(p)
        ));
    }
    for &(u, p) in rep.overgranted.iter().take(20) {
        s.push_str(&format!(
            "  over-granted: {} {}\n",
            m.user_name(u),
            m.perm_name(p)
        ));
    }
    s
}

/// Map from (user, perm) grants to roles, used by the reduction playback to
/// find a role through which a given edge is granted.
pub(crate) struct GrantIndex {
    role_users: Vec<FixedBitSet>,
    role_perms: Vec<FixedBitSet>,
}

impl GrantIndex {
    pub(crate) fn new(m: &AccessMatrix, pol: &RbacPolicy) -> Self {
        let mut role_users = Vec::with_capacity(pol.roles.len());
        let mut role_perms = Vec::with_capacity(pol.roles.len());
        for role in &pol.roles {
            let mut ub = FixedBitSet::with_capacity(m.user_count());
            for &u in &role.users {
                ub.insert(u as usize);
            }
            let mut pb = FixedBitSet::with_capacity(m.perm_count());
            for &p in &role.perms {
                pb.insert(p as usize);
            }
            role_users.push(ub);
            role_perms.push(pb);
        }
        GrantIndex {
            role_users,
            role_perms,
        }
    }

    /// First role granting (user, perm), if any.
    pub(crate) fn find(&self, user: u32, perm: u32) -> Option<usize> {
        (0..self.role_users.len()).find(|&i| {
            self.role_users[i].contains(user as usize) && self.role_perms[i].contains(perm as usize)
        })
    }

    pub(crate) fn add_grant(&mut self, role: usize, user: u32, perm: u32) {
        self.role_users[role].insert(user as usize);
        self.role_perms[role].insert(perm as usize);
    }

    pub(crate) fn into_roles(self, provenance: Vec<Provenance>) -> Vec<Role> {
        self.role_users
            .into_iter()
            .zip(self.role_perms)
            .zip(provenance)
            .map(|((ub, pb), prov)| {
                Role::new(
                    ub.ones().map(|u| u as u32).collect(),
                    pb.ones().map(|p| p as u32).collect(),
                    prov,
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AccessMatrix {
        AccessMatrix::from_pairs([("u0", "p0"), ("u0", "p1"), ("u1", "p1")]).unwrap()
    }

    #[test]
    fn edge_per_role_is_sound() {
        let m = small();
        let pol = RbacPolicy::one_role_per_edge(&m);
        assert!(verify_policy(&m, &pol).is_sound());
    }

    #[test]
    fn missing_grant_is_reported() {
        let m = small();
        let pol = RbacPolicy::new(vec![Role::new(vec![0], vec![0, 1], Provenance::Greedy)]);
        let rep = verify_policy(&m, &pol);
        assert!(!rep.is_sound());
        assert_eq!(rep.uncovered, vec![EdgeId(2)]);
        assert!(rep.overgranted.is_empty());
    }

    #[test]
    fn overgrant_is_reported() {
        let m = small();
        let pol = RbacPolicy::new(vec![
            Role::new(vec![0, 1], vec![0, 1], Provenance::Greedy),
        ]);
        let rep = verify_policy(&m, &pol);
        assert_eq!(rep.overgranted, vec![(1, 0)]);
    }

    #[test]
    fn json_round_trip() {
        let m = small();
        let pol = RbacPolicy::one_role_per_edge(&m);
        let mut buf = Vec::new();
        write_policy_json(&m, &pol, &mut buf).unwrap();
        let back = read_policy_json(&m, buf.as_slice()).unwrap();
        assert_eq!(back.role_count(), pol.role_count());
        assert!(verify_policy(&m, &back).is_sound());
    }

    #[test]
    fn unknown_identifier_is_reference_error() {
        let m = small();
        let json = r#"{"role_count":1,"roles":[{"users":["ghost"],"perms":["p0"],"provenance":"greedy"}]}"#;
        let err = read_policy_json(&m, json.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::UnknownIdentifier { .. }));
    }
}
