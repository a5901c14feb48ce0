#!/usr/bin/env python3
"""Prepend the Apache-2.0 notice to source files that lack it. Safe to rerun."""
import pathlib
import sys

NOTICE = """Copyright 2026 The pickcell Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.""".splitlines()

SKIP = {"vendor", "examples", "build", ".git"}
MARK = "Copyright 2026 The pickcell Authors"


def slash(lines):
    return "".join(("// " + l).rstrip() + "\n" for l in lines) + "\n"


def hash_(lines):
    return "".join(("# " + l).rstrip() + "\n" for l in lines) + "\n"


def html(lines):
    return "<!--\n" + "".join(l + "\n" for l in lines) + "-->\n\n"


def header_for(path):
    if path.suffix in {".cpp", ".hpp", ".h", ".jsonc"}:
        return slash(NOTICE)
    if path.name == "CMakeLists.txt" or path.suffix in {".py", ".cmake"}:
        return hash_(NOTICE)
    if path.suffix == ".md":
        return html(NOTICE)
    return None


def main(root):
    root = pathlib.Path(root)
    changed = 0
    for p in sorted(root.rglob("*")):
        if not p.is_file() or SKIP & set(p.relative_to(root).parts):
            continue
        if p.parent == root and p.suffix == ".md" and p.name != "README.md":
            continue
        hdr = header_for(p)
        if hdr is None:
            continue
        text = p.read_text()
        if MARK in text[:400]:
            continue
        if text.startswith("#!"):
            first, _, rest = text.partition("\n")
            text = first + "\n" + hdr + rest
        else:
            text = hdr + text
        p.write_text(text)
        changed += 1
    print(f"{changed} files updated")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent)
