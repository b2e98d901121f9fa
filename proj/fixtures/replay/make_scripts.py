"""Writes the response scripts used to author the FTP-excerpt replay stores.

Regenerate the stores after editing this file or the prompt templates:

    python3 fixtures/replay/make_scripts.py
    build/tools/author_replay_store --input fixtures/rfc/ftp_excerpt.txt \
        --protocol FTP --script fixtures/replay/ftp_excerpt.script.json \
        --store fixtures/replay/ftp_excerpt.store.json
    build/tools/author_replay_store --input fixtures/rfc/ftp_excerpt.txt \
        --protocol FTP --script fixtures/replay/ftp_excerpt_corrupt.script.json \
        --store fixtures/replay/ftp_excerpt_corrupt.store.json
"""
import json
import pathlib

HERE = pathlib.Path(__file__).parent


def fenced(value, prose=""):
    body = json.dumps(value, indent=2)
    return (prose + "\n\n" if prose else "") + "```json\n" + body + "\n```"


def entry(stage, path, text, note="", reask=False):
    match = [f"STAGE {stage} -", f"Section: {path}\n"]
    if reask:
        match.append("FORMAT REMINDER")
    e = {"match": match, "text": text}
    if note:
        e["note"] = note
    return e


def edge(counterpart, state, changes):
    return {"counterpart": counterpart, "system_state": state, "changes_state": changes}


EMPTY_SECTIONS = ["1", "2.1", "2.2", "4", "APP-A", "U-1"]

stage1 = {
    "3.1": [
        {"name": "USER", "category": "access-control",
         "description": "Identifies the user to the server."},
        {"name": "pass", "category": "Access Control",
         "description": "Sends the user's password, completing identification."},
        {"name": "QUIT", "category": "access-control",
         "description": "Terminates the user session and closes the control connection."},
    ],
    "3.2": [
        {"name": "PORT", "category": "transfer-parameter",
         "description": "Specifies the host and port for the data connection."},
        {"name": "TYPE", "category": "transfer-parameter",
         "description": "Sets the representation type of transferred data."},
    ],
    "3.3": [
        {"name": "RETR", "category": "service",
         "description": "Transfers a copy of the named file over the data connection."},
    ],
}

stage2 = {
    "3.1": [
        {"command": "USER", "preconditions": ["control connection established"],
         "postconditions": ["user name received"],
         "allowed_before": ["START"], "allowed_after": ["PASS", "QUIT"]},
        {"command": "PASS", "preconditions": ["user name received"],
         "postconditions": ["user logged in"],
         "allowed_before": ["USER"], "allowed_after": ["RETR", "TYPE"]},
        {"command": "QUIT", "preconditions": ["control connection established"],
         "postconditions": ["control connection closed"],
         "allowed_before": ["USER"], "allowed_after": ["END"]},
        {"command": "XYZZ", "preconditions": [], "postconditions": [],
         "allowed_before": ["USER"], "allowed_after": []},
    ],
    "3.2": [
        {"command": "PORT", "preconditions": ["user logged in"],
         "postconditions": ["data port set"],
         "allowed_before": ["TYPE"], "allowed_after": ["RETR"]},
        {"command": "TYPE", "preconditions": ["user logged in"],
         "postconditions": ["representation type set"],
         "allowed_before": ["PASS"], "allowed_after": ["PORT", "RETR"]},
    ],
    "3.3": [
        {"command": "RETR", "preconditions": ["user logged in"],
         "postconditions": ["file transferred"],
         "allowed_before": ["PASS", "TYPE", "PORT"], "allowed_after": ["RETR"]},
    ],
}

stage3 = {
    "3.1": [
        {"command": "USER",
         "purpose": "The USER command identifies the user to the server. It is normally "
                    "the first command sent after the control connection is made.",
         "preceding": [edge("START", "The control connection has been established.", False)],
         "subsequent": [
             edge("PASS", "The server has received the user name and awaits the password.", True),
             edge("QUIT", "The session is terminated.", True)]},
        {"command": "PASS",
         "purpose": "The PASS command is used to send the password, completing the user's "
                    "identification process. Executing PASS transitions the system to a state "
                    "where account information may be required. It cannot be used at any time, "
                    "it must immediately follow the USER command.",
         "preceding": [edge("USER", "The system must have received the USER command.",
                            "Yes, transitions to a state where account information may be required.")],
         "subsequent": [
             edge("RETR", "User must be logged in.", "Yes, retrieves a file."),
             edge("TYPE", "User must be logged in.", "Yes, sets the file transfer type.")]},
        {"command": "QUIT",
         "purpose": "The QUIT command terminates the session; the server closes the control "
                    "connection once no transfer is in progress.",
         "preceding": [edge("USER", "A user name has been supplied.", False)],
         "subsequent": [edge("END", "The control connection is closed.", True)]},
    ],
    "3.2": [
        {"command": "PORT",
         "purpose": "The PORT command specifies the data port used for the data connection.",
         "preceding": [edge("TYPE", "User must be logged in.", False)],
         "subsequent": [edge("RETR", "The data port is set.", True)]},
        {"command": "TYPE",
         "purpose": "The TYPE command sets the representation type for data transfer.",
         "preceding": [edge("PASS", "User must be logged in.", True)],
         "subsequent": [edge("PORT", "The transfer type is set.", True),
                        edge("RETR", "The transfer type is set.", True)]},
    ],
    "3.3": [
        {"command": "RETR",
         "purpose": "The RETR command transfers a copy of the named file to the other end of "
                    "the data connection.",
         "preceding": [edge("PASS", "User must be logged in.", True),
                       edge("TYPE", "User must be logged in.", True),
                       edge("PORT", "A data port has been specified.", True)],
         "subsequent": [edge("RETR", "A transfer has completed.", True)]},
    ],
}


def script(corrupt_path=None):
    entries = []
    for path in EMPTY_SECTIONS:
        entries.append(entry(1, path, fenced([], "This section defines no commands.")))
    for path in ["3.1", "3.2", "3.3"]:
        if path == corrupt_path:
            entries.append(entry(1, path, "Sorry, I cannot help with that request.",
                                 note="corrupted: not JSON"))
            entries.append(entry(1, path, "<html>upstream proxy error</html>",
                                 note="corrupted re-ask: not JSON", reask=True))
            continue
        entries.append(entry(1, path, fenced(stage1[path], "Commands found in this section:")))
        entries.append(entry(2, path, fenced(stage2[path])))
        entries.append(entry(3, path, fenced(stage3[path], "Here is the rulebook.")))
    return entries


def write(name, value):
    (HERE / name).write_text(json.dumps(value, indent=2) + "\n")


write("ftp_excerpt.script.json", script())
write("ftp_excerpt_corrupt.script.json", script(corrupt_path="3.2"))
