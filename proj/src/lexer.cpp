/*
 * Copyright mini-allo authors. All Rights Reserved.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "miniallo/frontend.hpp"

#include <cctype>

namespace miniallo {

std::vector<Token> lex(const std::string &text, int firstLine) {
  std::vector<Token> out;
  std::vector<int> indents{0};
  int line = firstLine;
  size_t i = 0, n = text.size();
  int nesting = 0;
  bool lineStart = true;
  size_t lineBegin = 0;

  auto push = [&](TokKind k, std::string t, int col) {
    out.push_back({k, std::move(t), {line, col}});
  };

  while (i < n) {
    if (lineStart && nesting == 0) {
      int col = 0;
      size_t j = i;
      while (j < n && (text[j] == ' ' || text[j] == '\t')) {
        col += text[j] == '\t' ? 4 : 1;
        ++j;
      }
      // Blank or comment-only lines do not affect indentation.
      if (j >= n || text[j] == '\n' || text[j] == '\r' || text[j] == '#') {
        while (j < n && text[j] != '\n')
          ++j;
        i = j < n ? j + 1 : j;
        lineBegin = i;
        ++line;
        continue;
      }
      if (col > indents.back()) {
        indents.push_back(col);
        push(TokKind::Indent, "", col + 1);
      } else {
        while (col < indents.back()) {
          indents.pop_back();
          push(TokKind::Dedent, "", col + 1);
        }
        if (col != indents.back())
          throw Error("inconsistent indentation", {line, col + 1});
      }
      i = j;
      lineStart = false;
    }
    char c = text[i];
    int col = static_cast<int>(i - lineBegin) + 1;
    if (c == '\n') {
      if (nesting == 0) {
        if (!out.empty() && out.back().kind != TokKind::Newline)
          push(TokKind::Newline, "", col);
        lineStart = true;
      }
      ++line;
      ++i;
      lineBegin = i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < n && text[i + 1] == '\n') {
      i += 2;
      lineBegin = i;
      ++line;
      continue;
    }
    if (c == '#') {
      while (i < n && text[i] != '\n')
        ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) ||
                       text[j] == '_'))
        ++j;
      push(TokKind::Name, text.substr(i, j - i), col);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      bool isFloat = false;
      while (j < n && std::isdigit(static_cast<unsigned char>(text[j])))
        ++j;
      if (j < n && text[j] == '.' && j + 1 < n &&
          std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        isFloat = true;
        ++j;
        while (j < n && std::isdigit(static_cast<unsigned char>(text[j])))
          ++j;
      } else if (j < n && text[j] == '.') {
        isFloat = true;
        ++j;
      }
      if (j < n && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < n && (text[k] == '+' || text[k] == '-'))
          ++k;
        if (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) {
          isFloat = true;
          j = k;
          while (j < n && std::isdigit(static_cast<unsigned char>(text[j])))
            ++j;
        }
      }
      push(isFloat ? TokKind::Float : TokKind::Int, text.substr(i, j - i),
           col);
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      size_t j = i + 1;
      while (j < n && text[j] != c && text[j] != '\n')
        ++j;
      if (j >= n || text[j] != c)
        throw Error("unterminated string", {line, col});
      push(TokKind::String, text.substr(i + 1, j - i - 1), col);
      i = j + 1;
      continue;
    }
    static const char *twoChar[] = {"//", "+=", "==", "!=", "<=", ">=", "->"};
    bool matched = false;
    for (auto *op : twoChar)
      if (text.compare(i, 2, op) == 0) {
        push(TokKind::Punct, op, col);
        i += 2;
        matched = true;
        break;
      }
    if (matched)
      continue;
    if (std::string("()[]{},:=+-*/%<>@.").find(c) != std::string::npos) {
      if (c == '(' || c == '[' || c == '{')
        ++nesting;
      if ((c == ')' || c == ']' || c == '}') && nesting > 0)
        --nesting;
      push(TokKind::Punct, std::string(1, c), col);
      ++i;
      continue;
    }
    throw Error(std::string("unexpected character '") + c + "'", {line, col});
  }
  if (!out.empty() && out.back().kind != TokKind::Newline)
    push(TokKind::Newline, "", 1);
  while (indents.size() > 1) {
    indents.pop_back();
    push(TokKind::Dedent, "", 1);
  }
  push(TokKind::End, "", 1);
  return out;
}

} // namespace miniallo
