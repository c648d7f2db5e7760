//! The forum: anonymous posts readable from the day after they are made.

use serde::{Deserialize, Serialize};

use crate::types::{AgentId, Day};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbsPost {
    pub post_id: u64,
    pub day: Day,
    /// Kept for auditing; never rendered.
    #[serde(skip_serializing, default)]
    pub author: AgentId,
    pub text: String,
}

/// Append-only post store.
#[derive(Clone, Debug, Default)]
pub struct BbsStore {
    posts: Vec<BbsPost>,
}

impl BbsStore {
    pub fn post(&mut self, day: Day, author: AgentId, text: String) -> &BbsPost {
        let post_id = self.posts.len() as u64;
        self.posts.push(BbsPost { post_id, day, author, text });
        self.posts.last().expect("just pushed")
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    pub fn posts(&self) -> &[BbsPost] {
        &self.posts
    }

    /// Texts of the previous day's posts in post order.
    pub fn digest(&self, day: Day) -> Vec<String> {
        if day < 2 {
            return Vec::new();
        }
        self.posts
            .iter()
            .filter(|p| p.day == day - 1)
            .map(|p| p.text.clone())
            .collect()
    }
}
