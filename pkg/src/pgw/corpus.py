"""Bundled, consistency-checked group definitions with a tagged manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import PgwError
from .oracle import PermGroup, parse_perm_file
from .pcgroup import GroupCtx
from .presentation import check_consistency, parse_presentation

CORPUS_DIR = Path(__file__).parent / "corpus_data"
MANIFEST_PATH = CORPUS_DIR / "manifest.json"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    pc_file: str | None
    perm_file: str | None
    tags: tuple[str, ...]
    expected_invariants: dict | None
    slow: bool = False

    @property
    def inconsistent(self) -> bool:
        return "inconsistent" in self.tags

    def presentation(self):
        if self.pc_file is None:
            raise PgwError(f"corpus entry {self.name} has no pc file")
        text = (CORPUS_DIR / self.pc_file).read_text()
        return parse_presentation(text, source=self.pc_file)

    def pc_group(self) -> GroupCtx:
        return GroupCtx.from_presentation(self.presentation())

    def perm_group(self) -> PermGroup:
        if self.perm_file is None:
            raise PgwError(f"corpus entry {self.name} has no perm file")
        return parse_perm_file((CORPUS_DIR / self.perm_file).read_text())

    def group(self):
        return self.pc_group() if self.pc_file else self.perm_group()


def load_corpus(include_slow: bool = False, check: bool = True) -> list[CorpusEntry]:
    """Load, parse, and consistency-check every bundled entry.

    Fails loudly on any unexpected inconsistency; the deliberately
    inconsistent bad sample must fail its check.
    """
    manifest = json.loads(MANIFEST_PATH.read_text())
    entries = []
    for raw in manifest["entries"]:
        entry = CorpusEntry(
            name=raw["name"],
            pc_file=raw.get("pc"),
            perm_file=raw.get("perm"),
            tags=tuple(raw.get("tags", ())),
            expected_invariants=raw.get("expected"),
            slow=raw.get("slow", False),
        )
        if entry.slow and not include_slow:
            continue
        if check and entry.pc_file is not None:
            report = check_consistency(entry.presentation(), mode="overlap-tests")
            if entry.inconsistent and report.consistent:
                raise PgwError(
                    f"corpus entry {entry.name} is tagged inconsistent but passed"
                )
            if not entry.inconsistent and not report.consistent:
                raise PgwError(
                    f"corpus entry {entry.name} unexpectedly inconsistent: "
                    f"{report.failures[0][0]}"
                )
        entries.append(entry)
    return entries


def get_entry(name: str, include_slow: bool = True) -> CorpusEntry:
    for entry in load_corpus(include_slow=include_slow, check=False):
        if entry.name == name:
            return entry
    raise KeyError(name)
