#pragma once

#include <string>
#include <vector>

namespace did::chat {

enum class Role { system, user, assistant };

std::string to_string(Role r);
Role role_from_string(const std::string& s);

struct Message {
    Role role = Role::user;
    std::string content;

    bool operator==(const Message&) const = default;
};

using Messages = std::vector<Message>;

}  // namespace did::chat
