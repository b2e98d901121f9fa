"""Writes the hand-built rulebook fixtures in canonical serialized form."""
import copy
import json
import pathlib

HERE = pathlib.Path(__file__).parent


def edge(counterpart, state, changes):
    return {"counterpart": counterpart, "system_state": state, "changes_state": changes}


def rule(command, purpose, preceding, subsequent, provenance):
    return {"command": command, "purpose": purpose, "preceding": preceding,
            "subsequent": subsequent, "provenance": provenance}


consistent = {
    "version": "rulebook/1",
    "protocol": "FTP",
    "rules": [
        rule("USER", "Identifies the user; normally the first command after connecting.",
             [edge("START", "The control connection has been established.", False)],
             [edge("PASS", "The server awaits the password.", True)], [0]),
        rule("PASS",
             "The PASS command is used to send the password, completing the user's "
             "identification process. It must immediately follow the USER command.",
             [edge("USER", "The system must have received the USER command.", True)],
             [edge("RETR", "User must be logged in.", True),
              edge("TYPE", "User must be logged in.", True)], [0]),
        rule("RETR", "Transfers a copy of a file over the data connection.",
             [edge("PASS", "User must be logged in.", True)],
             [edge("END", "The transfer completed.", False)], [1]),
        rule("TYPE", "Sets the representation type.",
             [edge("PASS", "User must be logged in.", True)],
             [edge("END", "The type is set.", False)], [1]),
    ],
    "warnings": [],
}

# USER no longer lists PASS as a subsequent command.
seeded = copy.deepcopy(consistent)
seeded["rules"][0]["subsequent"] = []

for name, value in [("consistent.json", consistent),
                    ("seeded_nonreciprocal.json", seeded)]:
    (HERE / name).write_text(json.dumps(value, indent=2) + "\n")
