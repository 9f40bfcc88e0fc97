//! JSON game files: explicit member lists, any coalition order.

use std::collections::HashMap;
use std::path::Path;

use coalition_var::game::MAX_TABULAR_PLAYERS;
use coalition_var::{Coalition, Game, GameForm};
use serde::{Deserialize, Serialize};

use crate::fail::{CmdResult, Failure, EXIT_LIMIT};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub players: Option<Vec<String>>,
    pub coalitions: Vec<CoalitionRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionRow {
    pub members: Vec<String>,
    pub value: f64,
}

/// A game with display names for its players.
pub struct NamedGame {
    pub game: Game,
    pub names: Vec<String>,
}

impl NamedGame {
    pub fn with_default_names(game: Game) -> NamedGame {
        let names = default_names(game.n_players());
        NamedGame { game, names }
    }

    pub fn player_index(&self, name: &str) -> CmdResult<usize> {
        self.names
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Failure::input(format!("unknown player '{name}'")))
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// `{a,b}` using player names.
pub fn describe(mask: u64, names: &[String]) -> String {
    let members: Vec<&str> = Coalition::from_mask(mask)
        .members()
        .map(|p| names[p.index()].as_str())
        .collect();
    format!("{{{}}}", members.join(","))
}

/// Resolves named coalitions into a complete table.
pub fn build_table<'a>(
    n: usize,
    names: &[String],
    rows: impl IntoIterator<Item = (Vec<&'a str>, f64)>,
) -> CmdResult<Game> {
    if n == 0 {
        return Err(Failure::input("a game needs at least one player"));
    }
    if n > MAX_TABULAR_PLAYERS {
        return Err(Failure::new(
            EXIT_LIMIT,
            format!("{n} players is too many for a tabular game (max {MAX_TABULAR_PLAYERS})"),
        ));
    }
    if names.len() != n {
        return Err(Failure::input(format!(
            "expected {n} player names, got {}",
            names.len()
        )));
    }
    let mut index = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            return Err(Failure::input(format!(
                "player name '{name}' is not unique"
            )));
        }
    }
    let mut table = vec![None; 1usize << n];
    table[0] = Some(0.0);
    let mut empty_seen = false;
    for (members, value) in rows {
        let mut mask = 0u64;
        for m in &members {
            let &i = index.get(m).ok_or_else(|| {
                Failure::input(format!(
                    "unknown player '{m}' in coalition {{{}}}",
                    members.join(",")
                ))
            })?;
            if mask >> i & 1 == 1 {
                return Err(Failure::input(format!(
                    "player '{m}' listed twice in coalition {{{}}}",
                    members.join(",")
                )));
            }
            mask |= 1 << i;
        }
        let label = describe(mask, names);
        if !value.is_finite() {
            return Err(Failure::input(format!(
                "coalition {label} has a non-finite value"
            )));
        }
        let duplicate = if mask == 0 {
            std::mem::replace(&mut empty_seen, true)
        } else {
            table[mask as usize].is_some()
        };
        if duplicate {
            return Err(Failure::input(format!(
                "coalition {label} appears more than once"
            )));
        }
        table[mask as usize] = Some(value);
    }
    let mut values = Vec::with_capacity(table.len());
    for (mask, v) in table.into_iter().enumerate() {
        match v {
            Some(v) => values.push(v),
            None => {
                return Err(Failure::input(format!(
                    "coalition {} is missing",
                    describe(mask as u64, names)
                )))
            }
        }
    }
    Ok(Game::from_table(n, values)?)
}

pub fn parse(text: &str) -> CmdResult<NamedGame> {
    let file: GameFile = serde_json::from_str(text)
        .map_err(|e| Failure::input(format!("malformed game file: {e}")))?;
    let names = file.players.unwrap_or_else(|| default_names(file.n));
    let rows = file
        .coalitions
        .iter()
        .map(|c| (c.members.iter().map(String::as_str).collect(), c.value));
    let game = build_table(file.n, &names, rows)?;
    Ok(NamedGame { game, names })
}

pub fn load(path: &Path) -> CmdResult<NamedGame> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

/// Expands a game into a file listing every non-empty coalition in mask
/// order.
pub fn to_file(named: &NamedGame) -> CmdResult<GameFile> {
    let tabular = named.game.to_tabular()?;
    let GameForm::Tabular(values) = tabular.form() else {
        unreachable!("to_tabular returns a table")
    };
    let coalitions = values
        .iter()
        .enumerate()
        .skip(1)
        .map(|(mask, &value)| CoalitionRow {
            members: Coalition::from_mask(mask as u64)
                .members()
                .map(|p| named.names[p.index()].clone())
                .collect(),
            value,
        })
        .collect();
    let defaults = default_names(named.game.n_players());
    Ok(GameFile {
        n: named.game.n_players(),
        players: (named.names != defaults).then(|| named.names.clone()),
        coalitions,
    })
}
