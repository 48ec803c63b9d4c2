// Copyright 2026 Tickwork Contributors
// SPDX-License-Identifier: Apache-2.0

//! Library surface of the `tickwork` command-line tool: configuration
//! resolution, presets, output formats and the command implementations.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;
