// SPDX-License-Identifier: Apache-2.0

//! Holds the acceptance suite; see `tests/acceptance.rs`.
