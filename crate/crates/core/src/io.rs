//! JSON game files and the built-in examples.
//!
//! ```json
//! {
//!   "states": ["up", "down"],
//!   "actions": ["buy", "wait"],
//!   "receiver_payoffs": [[1, -1], [0, 0]],
//!   "sender_payoffs": [[1, 1], [0, 0]],
//!   "prior": [0.5, 0.5]
//! }
//! ```
//!
//! `sender_affine` (one row of `n` coefficients plus a constant per action)
//! may replace `sender_payoffs`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{example_4_2_game, financial_game, threshold_game, Game, SenderPayoffs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDocument {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub receiver_payoffs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sender_payoffs: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sender_affine: Option<Vec<Vec<f64>>>,
    pub prior: Vec<f64>,
}

impl GameDocument {
    pub fn from_game(game: &Game) -> Self {
        let (sender_payoffs, sender_affine) = match game.sender_payoffs() {
            SenderPayoffs::Matrix(m) => (Some(m.clone()), None),
            SenderPayoffs::Affine(a) => (None, Some(a.clone())),
        };
        Self {
            states: game.states().to_vec(),
            actions: game.actions().to_vec(),
            receiver_payoffs: game.receiver_payoffs().to_vec(),
            sender_payoffs,
            sender_affine,
            prior: game.prior().coords().to_vec(),
        }
    }

    pub fn into_game(self) -> Result<Game> {
        let sender = match (self.sender_payoffs, self.sender_affine) {
            (Some(m), None) => SenderPayoffs::Matrix(m),
            (None, Some(a)) => SenderPayoffs::Affine(a),
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    "sender_payoffs",
                    "give either sender_payoffs or sender_affine, not both",
                ))
            }
            (None, None) => {
                return Err(Error::validation("sender_payoffs", "missing sender payoffs"))
            }
        };
        Game::new(self.states, self.actions, self.receiver_payoffs, sender, self.prior)
    }
}

pub fn from_json(text: &str) -> Result<Game> {
    let doc: GameDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_game()
}

pub fn to_json(game: &Game) -> String {
    serde_json::to_string_pretty(&GameDocument::from_game(game)).expect("game documents serialize")
}

pub fn save_game(game: &Game, path: &Path) -> Result<()> {
    fs::write(path, to_json(game)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// `financial`, `threshold:PI`, `advice42`, or a path to a JSON game file.
pub fn load_game(spec: &str) -> Result<Game> {
    match spec {
        "financial" => return Ok(financial_game()),
        "advice42" => return Ok(example_4_2_game()),
        _ => {}
    }
    if let Some(pi) = spec.strip_prefix("threshold:") {
        let pi: f64 = pi
            .parse()
            .map_err(|_| Error::validation("game", format!("bad threshold parameter {pi:?}")))?;
        return threshold_game(pi);
    }
    let text = fs::read_to_string(spec).map_err(|e| Error::Parse(format!("{spec}: {e}")))?;
    from_json(&text)
}
