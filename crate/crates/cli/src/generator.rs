//! Generator specs: `additive:w1,w2,..`, `majority:N`, `symmetric:g0,g1,..`
//! and `twotype:na,nb,sqrtkl`.

use coalition_var::Game;

use crate::fail::{CmdResult, Failure};
use crate::gamefile::NamedGame;

fn numbers<T: std::str::FromStr>(spec: &str, args: &str) -> CmdResult<Vec<T>> {
    args.split(',')
        .map(|a| {
            a.trim()
                .parse()
                .map_err(|_| Failure::input(format!("bad number '{a}' in generator '{spec}'")))
        })
        .collect()
}

pub fn parse(spec: &str) -> CmdResult<NamedGame> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| Failure::input(format!("generator '{spec}' has no ':'; try majority:5")))?;
    let game = match kind {
        "additive" => Game::additive(numbers(spec, args)?)?,
        "majority" => match numbers::<usize>(spec, args)?.as_slice() {
            [n] => Game::majority(*n)?,
            _ => {
                return Err(Failure::input(
                    "majority takes one player count, e.g. majority:101",
                ))
            }
        },
        "symmetric" => {
            let g: Vec<f64> = numbers(spec, args)?;
            if g.len() < 2 {
                return Err(Failure::input(
                    "symmetric needs g0,g1,... with at least two entries",
                ));
            }
            Game::symmetric(g.len() - 1, g)?
        }
        "twotype" => {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [na, nb, "sqrtkl"] => {
                    let count = |s: &str| {
                        s.parse::<usize>().map_err(|_| {
                            Failure::input(format!("bad player count '{s}' in '{spec}'"))
                        })
                    };
                    Game::sqrt_product(count(na)?, count(nb)?)?
                }
                [_, _, worth] => {
                    return Err(Failure::input(format!(
                        "unknown two-type worth '{worth}'; only sqrtkl is supported"
                    )))
                }
                _ => return Err(Failure::input("twotype takes na,nb,sqrtkl")),
            }
        }
        _ => {
            return Err(Failure::input(format!(
                "unknown generator '{kind}'; expected additive, majority, symmetric or twotype"
            )))
        }
    };
    Ok(NamedGame::with_default_names(game))
}
