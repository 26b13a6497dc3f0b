//! JSON forms of environments and policies.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{perception_histories, Alphabet, Kernel, Policy, Signature, TableEnvironment};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::quantity::{fmt_ratio, parse_ratio};

/// Probability rows as `"num/den"` strings.
pub type TableRows = Vec<Vec<String>>;

/// On-disk environment. Exactly one of `memoryless` (one row per action)
/// or `table` (keys `"y1,x1,…,y_k"`) is present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentFile {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub actions: Alphabet,
    pub perceptions: Alphabet,
    pub rewards: Vec<u32>,
    pub reward_bound: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub memoryless: Option<TableRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Vec<String>>>,
}

fn parse_row(row: &[String]) -> Result<Vec<num::rational::BigRational>> {
    row.iter().map(|s| parse_ratio(s)).collect()
}

impl EnvironmentFile {
    pub fn to_environment(&self) -> Result<TableEnvironment> {
        let actions = Alphabet::new(self.actions.size, self.actions.width)?;
        let perceptions = Alphabet::new(self.perceptions.size, self.perceptions.width)?;
        let sig = Signature::new(actions, perceptions, self.rewards.clone(), self.reward_bound)?;
        let kernel = match (&self.memoryless, &self.table) {
            (Some(rows), None) => Kernel::Memoryless(
                rows.iter()
                    .map(|r| parse_row(r))
                    .collect::<Result<Vec<_>>>()?,
            ),
            (None, Some(table)) => {
                let mut rows = BTreeMap::new();
                for (key, row) in table {
                    let parsed: Vec<usize> = if key.trim().is_empty() {
                        return Err(Error::InvalidEnvironment(
                            "table keys need at least the current action".into(),
                        ));
                    } else {
                        key.split(',')
                            .map(|s| {
                                s.trim().parse().map_err(|_| {
                                    Error::Parse(format!("bad table key {key:?}"))
                                })
                            })
                            .collect::<Result<_>>()?
                    };
                    if rows.insert(parsed, parse_row(row)?).is_some() {
                        return Err(Error::InvalidEnvironment(format!("duplicate key {key:?}")));
                    }
                }
                Kernel::History(rows)
            }
            _ => {
                return Err(Error::InvalidEnvironment(
                    "give exactly one of `memoryless` or `table`".into(),
                ))
            }
        };
        let name = if self.name.is_empty() { "environment" } else { &self.name };
        TableEnvironment::new(name, sig, kernel)
    }

    pub fn from_environment(env: &TableEnvironment) -> Self {
        use super::Environment;
        let sig = env.signature();
        let row = |r: &Vec<num::rational::BigRational>| r.iter().map(fmt_ratio).collect();
        let (memoryless, table) = match env.kernel() {
            Kernel::Memoryless(rows) => (Some(rows.iter().map(row).collect()), None),
            Kernel::History(rows) => (
                None,
                Some(
                    rows.iter()
                        .map(|(k, r)| {
                            let key: Vec<String> = k.iter().map(|v| v.to_string()).collect();
                            (key.join(","), row(r))
                        })
                        .collect(),
                ),
            ),
        };
        EnvironmentFile {
            name: env.name().to_string(),
            actions: sig.actions,
            perceptions: sig.perceptions,
            rewards: sig.rewards.clone(),
            reward_bound: sig.reward_bound,
            memoryless,
            table,
        }
    }

    /// Canonical description bits: compact JSON without the name, as bytes.
    /// Two environments with the same tables get the same bits.
    pub fn canonical_bits(&self) -> BitString {
        let mut anon = self.clone();
        anon.name.clear();
        if let Some(rows) = &mut anon.memoryless {
            for r in rows.iter_mut().flatten() {
                *r = canonical_ratio(r);
            }
        }
        if let Some(table) = &mut anon.table {
            for r in table.values_mut().flatten() {
                *r = canonical_ratio(r);
            }
        }
        let json = serde_json::to_string(&anon).expect("environment serializes");
        BitString::from_bytes(json.as_bytes())
    }
}

fn canonical_ratio(s: &str) -> String {
    parse_ratio(s).map(|r| fmt_ratio(&r)).unwrap_or_else(|_| s.to_string())
}

/// On-disk policy: a constant action, or a decision table keyed by
/// comma-separated perception histories (`""` for the first cycle).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decisions: Option<BTreeMap<String, usize>>,
}

impl PolicyFile {
    pub fn to_policy(&self, sig: &Signature) -> Result<Policy> {
        match (self.constant, &self.decisions) {
            (Some(a), None) => Policy::constant(sig, a, self.horizon),
            (None, Some(table)) => {
                let mut decisions = HashMap::new();
                for (key, &a) in table {
                    let h: Vec<usize> = if key.trim().is_empty() {
                        Vec::new()
                    } else {
                        key.split(',')
                            .map(|s| {
                                s.trim()
                                    .parse()
                                    .map_err(|_| Error::Parse(format!("bad history key {key:?}")))
                            })
                            .collect::<Result<_>>()?
                    };
                    decisions.insert(h, a);
                }
                Policy::new(sig.actions, sig.perceptions, self.horizon, decisions)
            }
            _ => Err(Error::InvalidPolicy(
                "give exactly one of `constant` or `decisions`".into(),
            )),
        }
    }

    pub fn from_policy(policy: &Policy) -> Self {
        let decisions = perception_histories(policy.perceptions().size, policy.horizon())
            .into_iter()
            .map(|h| {
                let key: Vec<String> = h.iter().map(|v| v.to_string()).collect();
                (key.join(","), policy.act(&h))
            })
            .collect();
        PolicyFile {
            horizon: policy.horizon(),
            constant: None,
            decisions: Some(decisions),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cybernetic::{echo, fair_coin, Environment};

    #[test]
    fn environment_round_trip() {
        for env in [echo(), fair_coin()] {
            let file = EnvironmentFile::from_environment(&env);
            let json = serde_json::to_string(&file).unwrap();
            let back: EnvironmentFile = serde_json::from_str(&json).unwrap();
            assert_eq!(back.to_environment().unwrap(), env);
        }
    }

    #[test]
    fn history_table_parses() {
        let json = r#"{"name":"t","actions":{"size":2,"width":1},
            "perceptions":{"size":2,"width":1},"rewards":[0,1],"reward_bound":1,
            "table":{"0":["1/2","1/2"],"1":["0","1"],"1,1,0":["1","0"]}}"#;
        let file: EnvironmentFile = serde_json::from_str(json).unwrap();
        let env = file.to_environment().unwrap();
        assert_eq!(env.joint(&[(1, 1), (0, 0)]), crate::quantity::ratio(1, 1));
        assert_eq!(EnvironmentFile::from_environment(&env), file);
    }

    #[test]
    fn invalid_files_rejected() {
        let both = r#"{"actions":{"size":2,"width":1},"perceptions":{"size":2,"width":1},
            "rewards":[0,1],"reward_bound":1,"memoryless":[["1","0"],["0","1"]],"table":{}}"#;
        let f: EnvironmentFile = serde_json::from_str(both).unwrap();
        assert!(f.to_environment().is_err());
        let over = r#"{"actions":{"size":2,"width":1},"perceptions":{"size":2,"width":1},
            "rewards":[0,1],"reward_bound":1,"memoryless":[["1","1/2"],["0","1"]]}"#;
        let f: EnvironmentFile = serde_json::from_str(over).unwrap();
        assert!(f.to_environment().is_err());
        let extra = r#"{"actions":{"size":2,"width":1},"perceptions":{"size":2,"width":1},
            "rewards":[0,1],"reward_bound":1,"memoryless":[],"colour":1}"#;
        assert!(serde_json::from_str::<EnvironmentFile>(extra).is_err());
    }

    #[test]
    fn canonical_bits_ignore_name_and_spelling() {
        let mut a = EnvironmentFile::from_environment(&fair_coin());
        let b = a.clone();
        a.name = "other".into();
        a.memoryless = Some(vec![vec!["2/4".into(), "1/2".into()]; 2]);
        assert_eq!(a.canonical_bits(), b.canonical_bits());
    }

    #[test]
    fn policy_files() {
        let sig = crate::cybernetic::Signature::binary();
        let p = PolicyFile { horizon: 2, constant: Some(1), decisions: None }
            .to_policy(&sig)
            .unwrap();
        let file = PolicyFile::from_policy(&p);
        assert_eq!(file.decisions.as_ref().unwrap().len(), 3);
        assert_eq!(file.to_policy(&sig).unwrap(), p);
        let partial = PolicyFile {
            horizon: 2,
            constant: None,
            decisions: Some(BTreeMap::from([("".into(), 0)])),
        };
        assert!(partial.to_policy(&sig).is_err());
    }
}
