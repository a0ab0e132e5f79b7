//! Bounded undo/redo over full view-state snapshots.

use std::collections::VecDeque;

use thiserror::Error;

use crate::view::ViewState;

pub const DEFAULT_HISTORY_CAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum HistoryError {
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("nothing to redo")]
    NothingToRedo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct History {
    initial: ViewState,
    past: VecDeque<ViewState>,
    current: ViewState,
    future: Vec<ViewState>,
    cap: usize,
}

impl History {
    pub fn new(initial: ViewState, cap: usize) -> Self {
        Self {
            current: initial.clone(),
            initial,
            past: VecDeque::new(),
            future: Vec::new(),
            cap: cap.max(1),
        }
    }

    pub fn current(&self) -> &ViewState {
        &self.current
    }

    pub fn initial(&self) -> &ViewState {
        &self.initial
    }

    pub fn can_undo(&self) -> bool {
        !self.past.is_empty()
    }

    pub fn can_redo(&self) -> bool {
        !self.future.is_empty()
    }

    pub fn undo_depth(&self) -> usize {
        self.past.len()
    }

    pub fn redo_depth(&self) -> usize {
        self.future.len()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Makes `state` current. The redo stack is dropped and the oldest undo
    /// entry is evicted beyond the cap.
    pub fn push(&mut self, state: ViewState) {
        let prev = std::mem::replace(&mut self.current, state);
        self.past.push_back(prev);
        while self.past.len() > self.cap {
            self.past.pop_front();
        }
        self.future.clear();
    }

    pub fn undo(&mut self) -> Result<&ViewState, HistoryError> {
        let prev = self.past.pop_back().ok_or(HistoryError::NothingToUndo)?;
        let cur = std::mem::replace(&mut self.current, prev);
        self.future.push(cur);
        Ok(&self.current)
    }

    pub fn redo(&mut self) -> Result<&ViewState, HistoryError> {
        let next = self.future.pop().ok_or(HistoryError::NothingToRedo)?;
        let cur = std::mem::replace(&mut self.current, next);
        self.past.push_back(cur);
        Ok(&self.current)
    }

    /// Pushes the initial state; returns `false` (and changes nothing) when
    /// already there.
    pub fn reset(&mut self) -> bool {
        if self.current == self.initial {
            return false;
        }
        self.push(self.initial.clone());
        true
    }
}
